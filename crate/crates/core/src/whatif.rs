//! Node-by-node comparison of one scenario under two configurations.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::engine::{assess_with, AssessOptions, Assessment};
use crate::error::EngineError;
use crate::level::{Level, RiskRating};
use crate::model::{Configuration, ThreatModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Change<T> {
    pub base: T,
    pub alt: T,
}

impl<T: PartialEq> Change<T> {
    pub fn is_change(&self) -> bool {
        self.base != self.alt
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorChange {
    pub vector: String,
    pub objective: String,
    pub changed: bool,
    pub residual: Change<Level>,
    pub combined: Change<Level>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveChange {
    pub objective: String,
    pub changed: bool,
    pub likelihood: Change<Level>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfDiff {
    pub scenario: String,
    pub source: String,
    pub base: String,
    pub alt: String,
    pub vectors: Vec<VectorChange>,
    pub objectives: Vec<ObjectiveChange>,
    pub likelihood: Change<Level>,
    pub risk: Change<RiskRating>,
    /// `alt` score minus `base` score.
    pub score_delta: i8,
}

impl WhatIfDiff {
    /// True when no node changes between the two configurations.
    pub fn is_empty(&self) -> bool {
        !self.vectors.iter().any(|v| v.changed)
            && !self.objectives.iter().any(|o| o.changed)
            && !self.likelihood.is_change()
            && !self.risk.is_change()
    }

    pub fn changed_vectors(&self) -> impl Iterator<Item = &VectorChange> {
        self.vectors.iter().filter(|v| v.changed)
    }

    pub fn changed_objectives(&self) -> impl Iterator<Item = &ObjectiveChange> {
        self.objectives.iter().filter(|o| o.changed)
    }
}

pub fn whatif_diff(
    model: &ThreatModel,
    scenario: &str,
    source: &str,
    base: &Configuration,
    alt: &Configuration,
) -> Result<WhatIfDiff, EngineError> {
    let a = assess_with(model, scenario, source, base, AssessOptions::default())?;
    let b = assess_with(model, scenario, source, alt, AssessOptions::default())?;
    Ok(diff_assessments(&a, &b))
}

/// Both assessments must cover the same scenario and source, so their
/// vectors and objectives line up one to one.
pub fn diff_assessments(base: &Assessment, alt: &Assessment) -> WhatIfDiff {
    debug_assert_eq!(base.scenario, alt.scenario);
    debug_assert_eq!(base.source, alt.source);
    let vectors = base
        .vector_scores
        .iter()
        .zip(&alt.vector_scores)
        .map(|(x, y)| {
            let residual = Change { base: x.residual, alt: y.residual };
            let combined = Change { base: x.combined, alt: y.combined };
            VectorChange {
                vector: x.vector.clone(),
                objective: x.objective.clone(),
                changed: residual.is_change() || combined.is_change(),
                residual,
                combined,
            }
        })
        .collect();
    let objectives = base
        .objective_likelihoods
        .iter()
        .zip(&alt.objective_likelihoods)
        .map(|(x, y)| {
            let likelihood = Change { base: x.likelihood, alt: y.likelihood };
            ObjectiveChange { objective: x.objective.clone(), changed: likelihood.is_change(), likelihood }
        })
        .collect();
    WhatIfDiff {
        scenario: base.scenario.clone(),
        source: base.source.clone(),
        base: base.configuration.clone(),
        alt: alt.configuration.clone(),
        vectors,
        objectives,
        likelihood: Change { base: base.scenario_likelihood, alt: alt.scenario_likelihood },
        risk: Change { base: base.risk, alt: alt.risk },
        score_delta: alt.risk.score() as i8 - base.risk.score() as i8,
    }
}
