//! Risk engine for attack-tree based threat models of agentic AI systems.
//!
//! A [`ThreatModel`](model::ThreatModel) names assets, threat sources, a
//! business impact matrix, impact scenarios, one attack tree per scenario
//! and the security controls that can be enabled. [`engine::assess`] turns
//! a (scenario, threat source, configuration) triple into an
//! [`Assessment`](engine::Assessment): per-vector and per-objective
//! likelihoods, the weakest-link scenario likelihood, its risk rating and
//! the full attack-surface histogram.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod engine;
pub mod error;
pub mod impact;
pub mod level;
pub mod model;
pub mod surface;
pub mod tables;
pub mod validate;
pub mod whatif;

#[cfg(feature = "arbitrary")]
pub mod arbitrary;

pub use engine::{assess, assess_with, AssessOptions, Assessment, Basis, ObjectiveScore, VectorScore};
pub use error::EngineError;
pub use level::{level_max, level_min, Level, RiskLabel, RiskRating};
pub use model::ThreatModel;
pub use surface::{attack_surface, Histogram, SurfaceProfile, DEFAULT_PATH_CAP};
pub use validate::{validate_model, Finding, Severity, ValidationReport};
pub use whatif::{whatif_diff, WhatIfDiff};
