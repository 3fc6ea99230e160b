//! Whole-model well-formedness checks.
//!
//! Validation never stops early: every finding is collected so an analyst
//! sees the full list in one pass.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::impact::derive_scenario_impact;
use crate::model::{Nature, ReferenceProblem, SourceCategory, ThreatModel, FORMAT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// Stable finding codes.
pub mod codes {
    pub const UNSUPPORTED_VERSION: &str = "unsupported-version";
    pub const DUPLICATE_ID: &str = "duplicate-id";
    pub const DANGLING_REFERENCE: &str = "dangling-reference";
    pub const SOURCE_CAPABILITY: &str = "source-capability";
    pub const SOURCE_CATEGORY: &str = "source-category";
    pub const DUPLICATE_IMPACT_CELL: &str = "duplicate-impact-cell";
    pub const EMPTY_DIMENSIONS: &str = "empty-dimensions";
    pub const EMPTY_SCOPE: &str = "empty-scope";
    pub const NO_IMPACT_BASIS: &str = "no-impact-basis";
    pub const IMPACT_MISMATCH: &str = "impact-mismatch";
    pub const EMPTY_OBJECTIVE: &str = "empty-objective";
    pub const EMPTY_TECHNIQUE: &str = "empty-technique";
    pub const MISSING_SKILL: &str = "missing-skill";
    pub const MISSING_INHERENT: &str = "missing-inherent";
    pub const CONTROL_RAISES_RESIDUAL: &str = "control-raises-residual";

    pub const VECTOR_UNCONTROLLED: &str = "vector-uncontrolled";
    pub const SOURCE_NEVER_IN_SCOPE: &str = "source-never-in-scope";
    pub const SCENARIO_WITHOUT_TREE: &str = "scenario-without-tree";
    pub const SOURCE_WITHOUT_TREE: &str = "source-without-tree";

    pub const ERRORS: [&str; 15] = [
        UNSUPPORTED_VERSION,
        DUPLICATE_ID,
        DANGLING_REFERENCE,
        SOURCE_CAPABILITY,
        SOURCE_CATEGORY,
        DUPLICATE_IMPACT_CELL,
        EMPTY_DIMENSIONS,
        EMPTY_SCOPE,
        NO_IMPACT_BASIS,
        IMPACT_MISMATCH,
        EMPTY_OBJECTIVE,
        EMPTY_TECHNIQUE,
        MISSING_SKILL,
        MISSING_INHERENT,
        CONTROL_RAISES_RESIDUAL,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Finding {
    pub severity: Severity,
    pub code: String,
    pub location: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}] {}: {}", self.severity, self.code, self.location, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    /// True when there are no errors.
    pub fn is_evaluable(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    fn push(&mut self, severity: Severity, code: &str, location: String, message: String) {
        self.findings.push(Finding { severity, code: code.to_string(), location, message });
    }

    fn error(&mut self, code: &str, location: String, message: String) {
        self.push(Severity::Error, code, location, message);
    }

    fn warn(&mut self, code: &str, location: String, message: String) {
        self.push(Severity::Warning, code, location, message);
    }
}

pub fn validate_model(model: &ThreatModel) -> ValidationReport {
    let mut r = ValidationReport::default();

    if model.matra_version != FORMAT_VERSION {
        r.error(
            codes::UNSUPPORTED_VERSION,
            "matra_version".into(),
            format!("expected \"{FORMAT_VERSION}\", found \"{}\"", model.matra_version),
        );
    }

    for p in model.reference_problems() {
        let code = match p {
            ReferenceProblem::Duplicate { .. } => codes::DUPLICATE_ID,
            ReferenceProblem::Dangling { .. } => codes::DANGLING_REFERENCE,
        };
        let location = p.location().to_string();
        r.error(code, location, p.to_string());
    }

    check_sources(model, &mut r);
    check_impacts(model, &mut r);
    check_trees(model, &mut r);
    check_controls(model, &mut r);
    r
}

fn check_sources(model: &ThreatModel, r: &mut ValidationReport) {
    for (i, s) in model.threat_sources.iter().enumerate() {
        match (s.nature, s.capability) {
            (Nature::Adversarial, None) => r.error(
                codes::SOURCE_CAPABILITY,
                format!("threat_sources[{i}].capability"),
                format!("adversarial source `{}` needs a capability level", s.id),
            ),
            (Nature::NonAdversarial, Some(_)) => r.error(
                codes::SOURCE_CAPABILITY,
                format!("threat_sources[{i}].capability"),
                format!("non-adversarial source `{}` must not carry a capability level", s.id),
            ),
            _ => {}
        }
        if (s.category == SourceCategory::Accidental) != (s.nature == Nature::NonAdversarial) {
            r.error(
                codes::SOURCE_CATEGORY,
                format!("threat_sources[{i}].category"),
                format!(
                    "source `{}`: category `{}` is inconsistent with nature `{}`",
                    s.id,
                    s.category.as_str(),
                    s.nature.as_str()
                ),
            );
        }
        if !model.scenarios.iter().any(|sc| sc.in_scope(&s.id)) {
            r.warn(
                codes::SOURCE_NEVER_IN_SCOPE,
                format!("threat_sources[{i}]"),
                format!("source `{}` is not in scope for any scenario", s.id),
            );
        }
    }
}

fn check_impacts(model: &ThreatModel, r: &mut ValidationReport) {
    for (i, c) in model.impact_matrix.iter().enumerate() {
        let first = model
            .impact_matrix
            .iter()
            .position(|d| d.asset == c.asset && d.dimension == c.dimension && d.source == c.source);
        if first != Some(i) {
            r.error(
                codes::DUPLICATE_IMPACT_CELL,
                format!("impact_matrix[{i}]"),
                format!("second cell for ({}, {:?}, {})", c.asset, c.dimension, c.source),
            );
        }
    }

    for (i, s) in model.scenarios.iter().enumerate() {
        if s.dimensions.is_empty() {
            r.error(
                codes::EMPTY_DIMENSIONS,
                format!("scenarios[{i}].dimensions"),
                format!("scenario `{}` names no CIA dimension", s.id),
            );
        }
        if s.in_scope_sources.is_empty() {
            r.error(
                codes::EMPTY_SCOPE,
                format!("scenarios[{i}].in_scope_sources"),
                format!("scenario `{}` has no threat source in scope", s.id),
            );
        }
        match derive_scenario_impact(s, &model.impact_matrix, &model.threat_sources) {
            Ok(derived) if derived != s.impact => r.error(
                codes::IMPACT_MISMATCH,
                format!("scenarios[{i}].impact"),
                format!("scenario `{}` declares {} but the impact matrix yields {}", s.id, s.impact, derived),
            ),
            Ok(_) => {}
            Err(_) if s.in_scope_sources.is_empty() || s.dimensions.is_empty() => {}
            Err(e) => r.error(codes::NO_IMPACT_BASIS, format!("scenarios[{i}]"), e.to_string()),
        }
        if !model.has_tree(&s.id) {
            r.warn(
                codes::SCENARIO_WITHOUT_TREE,
                format!("scenarios[{i}]"),
                format!("scenario `{}` has no attack tree", s.id),
            );
        } else {
            for src in s.in_scope_sources.iter().filter_map(|id| model.source(id)) {
                if !model.objectives_of(&s.id).any(|o| o.applies(src.nature)) {
                    r.warn(
                        codes::SOURCE_WITHOUT_TREE,
                        format!("scenarios[{i}].in_scope_sources"),
                        format!("no objective of `{}` applies to {} source `{}`", s.id, src.nature.as_str(), src.id),
                    );
                }
            }
        }
    }
}

fn check_trees(model: &ThreatModel, r: &mut ValidationReport) {
    for (i, o) in model.trees.objectives.iter().enumerate() {
        if model.techniques_of(&o.id).next().is_none() {
            r.error(
                codes::EMPTY_OBJECTIVE,
                format!("trees.objectives[{i}]"),
                format!("objective `{}` has no technique", o.id),
            );
        }
    }
    for (i, t) in model.trees.techniques.iter().enumerate() {
        if model.vectors_of(&t.id).next().is_none() {
            r.error(
                codes::EMPTY_TECHNIQUE,
                format!("trees.techniques[{i}]"),
                format!("technique `{}` has no vector", t.id),
            );
        }
    }

    for (i, v) in model.trees.vectors.iter().enumerate() {
        let Some(objective) = model.technique(&v.technique).and_then(|t| model.objective(&t.objective)) else {
            continue;
        };
        let Some(scenario) = model.scenario(&objective.scenario) else {
            continue;
        };
        let natures = scenario
            .in_scope_sources
            .iter()
            .filter_map(|id| model.source(id))
            .map(|s| s.nature)
            .filter(|n| objective.applies(*n));
        let (mut adversarial, mut accidental) = (false, false);
        for n in natures {
            match n {
                Nature::Adversarial => adversarial = true,
                Nature::NonAdversarial => accidental = true,
            }
        }
        if adversarial && v.skill_required.is_none() {
            r.error(
                codes::MISSING_SKILL,
                format!("trees.vectors[{i}].skill_required"),
                format!(
                    "vector `{}` is reachable by an adversarial source in `{}` but has no skill requirement",
                    v.id, scenario.id
                ),
            );
        }
        if accidental && v.inherent_likelihood.is_none() {
            r.error(
                codes::MISSING_INHERENT,
                format!("trees.vectors[{i}].inherent_likelihood"),
                format!(
                    "vector `{}` is reachable by a non-adversarial source in `{}` but has no inherent likelihood",
                    v.id, scenario.id
                ),
            );
        }
    }
}

fn check_controls(model: &ThreatModel, r: &mut ValidationReport) {
    for (i, c) in model.controls.iter().enumerate() {
        for (j, e) in c.effects.iter().enumerate() {
            if let Some(v) = model.vector(&e.vector) {
                if e.residual > v.baseline_residual {
                    r.error(
                        codes::CONTROL_RAISES_RESIDUAL,
                        format!("controls[{i}].effects[{j}].residual"),
                        format!("control `{}` raises `{}` from {} to {}", c.id, v.id, v.baseline_residual, e.residual),
                    );
                }
            }
        }
    }
    for (i, v) in model.trees.vectors.iter().enumerate() {
        let targeted = model.controls.iter().flat_map(|c| &c.effects).any(|e| e.vector == v.id);
        if !targeted {
            r.warn(
                codes::VECTOR_UNCONTROLLED,
                format!("trees.vectors[{i}]"),
                format!("no control affects vector `{}`", v.id),
            );
        }
    }
}
