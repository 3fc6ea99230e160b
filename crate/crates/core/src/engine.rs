//! Likelihood propagation through an attack tree under a control
//! configuration, and the resulting risk.
//!
//! Per vector, a capability fit (adversarial) or inherent likelihood
//! (non-adversarial) is combined with the residual success likelihood left
//! by the enabled controls. An objective takes the best vector, a scenario
//! the weakest of its objectives.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::level::{level_max, level_min, Level, RiskRating};
use crate::model::{AttackVector, Configuration, Control, ThreatModel, ThreatSource};
use crate::surface::{attack_surface, SurfaceProfile, DEFAULT_PATH_CAP};
use crate::tables::{capability_fit, combine_adversarial, combine_nonadversarial, risk_rating};

/// Which quantity a vector's first rating represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    CapabilityFit,
    Inherent,
}

impl Basis {
    pub const fn label(self) -> &'static str {
        match self {
            Basis::CapabilityFit => "capfit",
            Basis::Inherent => "inherent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorScore {
    pub vector: String,
    pub objective: String,
    pub basis: Basis,
    pub fit_or_inherent: Level,
    pub residual: Level,
    pub combined: Level,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveScore {
    pub objective: String,
    pub likelihood: Level,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assessment {
    pub scenario: String,
    pub source: String,
    pub configuration: String,
    pub configuration_name: String,
    pub enabled_controls: Vec<String>,
    /// Grouped by objective, in document order.
    pub vector_scores: Vec<VectorScore>,
    pub objective_likelihoods: Vec<ObjectiveScore>,
    pub scenario_likelihood: Level,
    pub impact: Level,
    pub risk: RiskRating,
    pub surface: SurfaceProfile,
}

impl Assessment {
    pub fn vector(&self, id: &str) -> Option<&VectorScore> {
        self.vector_scores.iter().find(|v| v.vector == id)
    }

    pub fn objective(&self, id: &str) -> Option<Level> {
        self.objective_likelihoods.iter().find(|o| o.objective == id).map(|o| o.likelihood)
    }

    pub fn vectors_of<'a>(&'a self, objective: &'a str) -> impl Iterator<Item = &'a VectorScore> + 'a {
        self.vector_scores.iter().filter(move |v| v.objective == objective)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssessOptions {
    pub path_cap: u64,
}

impl Default for AssessOptions {
    fn default() -> Self {
        AssessOptions { path_cap: DEFAULT_PATH_CAP }
    }
}

/// Baseline residual lowered by every enabled control that targets the
/// vector. Controls stack by taking the strongest (lowest) residual.
pub fn effective_residual(vector: &AttackVector, config: &Configuration, controls: &[Control]) -> Level {
    controls
        .iter()
        .filter(|c| config.is_enabled(&c.id))
        .flat_map(|c| c.effects.iter())
        .filter(|e| e.vector == vector.id)
        .map(|e| e.residual)
        .fold(vector.baseline_residual, Level::min)
}

/// Scores one vector for one source. `objective` is recorded on the score
/// for grouping.
pub fn score_vector(
    vector: &AttackVector,
    objective: &str,
    source: &ThreatSource,
    config: &Configuration,
    controls: &[Control],
) -> Result<VectorScore, EngineError> {
    let residual = effective_residual(vector, config, controls);
    let (basis, first, combined) = if source.is_adversarial() {
        let capability = source.capability.ok_or_else(|| EngineError::MissingCapability(source.id.clone()))?;
        let skill = vector.skill_required.ok_or_else(|| EngineError::MissingSkill(vector.id.clone()))?;
        let fit = capability_fit(capability, skill);
        (Basis::CapabilityFit, fit, combine_adversarial(fit, residual))
    } else {
        let inherent = vector.inherent_likelihood.ok_or_else(|| EngineError::MissingInherent(vector.id.clone()))?;
        (Basis::Inherent, inherent, combine_nonadversarial(inherent, residual))
    };
    Ok(VectorScore {
        vector: vector.id.clone(),
        objective: objective.to_string(),
        basis,
        fit_or_inherent: first,
        residual,
        combined,
    })
}

/// Path of least resistance: the best vector under the objective.
pub fn objective_likelihood<'a, I>(objective: &str, scores: I) -> Result<Level, EngineError>
where
    I: IntoIterator<Item = &'a VectorScore>,
{
    level_max(scores.into_iter().map(|s| s.combined)).map_err(|_| EngineError::EmptyObjective(objective.to_string()))
}

/// Every objective must succeed: the weakest one bounds the scenario.
pub fn scenario_likelihood<I>(scenario: &str, objective_likelihoods: I) -> Result<Level, EngineError>
where
    I: IntoIterator<Item = Level>,
{
    level_min(objective_likelihoods).map_err(|_| EngineError::EmptyScenario(scenario.to_string()))
}

/// Resolves a configuration id against the model. `default` falls back to
/// the empty control set when the model does not declare it.
pub fn resolve_configuration(model: &ThreatModel, id: &str) -> Result<Configuration, EngineError> {
    match model.configuration(id) {
        Some(c) => Ok(c.clone()),
        None if id == crate::model::DEFAULT_CONFIGURATION => Ok(model.default_configuration()),
        None => Err(EngineError::UnknownConfiguration(id.to_string())),
    }
}

pub fn assess(
    model: &ThreatModel,
    scenario: &str,
    source: &str,
    config: &Configuration,
) -> Result<Assessment, EngineError> {
    assess_with(model, scenario, source, config, AssessOptions::default())
}

pub fn assess_with(
    model: &ThreatModel,
    scenario_id: &str,
    source_id: &str,
    config: &Configuration,
    options: AssessOptions,
) -> Result<Assessment, EngineError> {
    let scenario = model.scenario(scenario_id).ok_or_else(|| EngineError::UnknownScenario(scenario_id.to_string()))?;
    let source = model.source(source_id).ok_or_else(|| EngineError::UnknownSource(source_id.to_string()))?;
    if !scenario.in_scope(source_id) {
        return Err(EngineError::OutOfScope { scenario: scenario_id.to_string(), source_id: source_id.to_string() });
    }
    if let Some(missing) = config.enabled_controls.iter().find(|c| model.control(c).is_none()) {
        return Err(EngineError::UnknownControl(missing.clone()));
    }

    let objectives: Vec<_> = model.objectives_of(scenario_id).filter(|o| o.applies(source.nature)).collect();
    if objectives.is_empty() {
        return Err(EngineError::NoTree { scenario: scenario_id.to_string(), source_id: source_id.to_string() });
    }

    let mut vector_scores = Vec::new();
    let mut objective_likelihoods = Vec::with_capacity(objectives.len());
    let mut per_objective: Vec<Vec<Level>> = Vec::with_capacity(objectives.len());
    for objective in &objectives {
        let start = vector_scores.len();
        for vector in model.vectors_under(&objective.id) {
            vector_scores.push(score_vector(vector, &objective.id, source, config, &model.controls)?);
        }
        let scores = &vector_scores[start..];
        let likelihood = objective_likelihood(&objective.id, scores)?;
        objective_likelihoods.push(ObjectiveScore { objective: objective.id.clone(), likelihood });
        per_objective.push(scores.iter().map(|s| s.combined).collect());
    }

    let likelihood = scenario_likelihood(scenario_id, objective_likelihoods.iter().map(|o| o.likelihood))?;
    let surface = attack_surface(&per_objective, options.path_cap)?;
    debug_assert_eq!(surface.histogram.top(), Some(likelihood));

    Ok(Assessment {
        scenario: scenario_id.to_string(),
        source: source_id.to_string(),
        configuration: config.id.clone(),
        configuration_name: config.name.clone(),
        enabled_controls: config.enabled_controls.clone(),
        vector_scores,
        objective_likelihoods,
        scenario_likelihood: likelihood,
        impact: scenario.impact,
        risk: risk_rating(likelihood, scenario.impact),
        surface,
    })
}

/// Every (scenario, source) pair that can be assessed: in scope and with
/// at least one applicable objective. Document order.
pub fn assessable_pairs(model: &ThreatModel) -> Vec<(String, String)> {
    model
        .scenarios
        .iter()
        .flat_map(|s| model.assessable_sources(s).into_iter().map(move |src| (s.id.clone(), src.id.clone())))
        .collect()
}
