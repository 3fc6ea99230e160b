use alloc::string::String;

use thiserror::Error;

use crate::level::RiskLabel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("cannot aggregate an empty list of levels")]
    EmptyAggregation,
    #[error("risk label {label:?} cannot carry score {score}")]
    InvalidRisk { label: RiskLabel, score: u8 },
    #[error("scenario {0} has no applicable impact cell")]
    NoImpactBasis(String),
    #[error("unknown scenario {0}")]
    UnknownScenario(String),
    #[error("unknown threat source {0}")]
    UnknownSource(String),
    #[error("unknown configuration {0}")]
    UnknownConfiguration(String),
    #[error("unknown control {0}")]
    UnknownControl(String),
    #[error("threat source {source_id} is not in scope for scenario {scenario}")]
    OutOfScope { scenario: String, source_id: String },
    #[error("scenario {scenario} has no attack tree applicable to threat source {source_id}")]
    NoTree { scenario: String, source_id: String },
    #[error("vector {0} has no skill requirement but is assessed for an adversarial source")]
    MissingSkill(String),
    #[error("vector {0} has no inherent likelihood but is assessed for a non-adversarial source")]
    MissingInherent(String),
    #[error("adversarial threat source {0} has no capability level")]
    MissingCapability(String),
    #[error("objective {0} has no vectors")]
    EmptyObjective(String),
    #[error("scenario {0} has no objectives")]
    EmptyScenario(String),
    #[error("{paths} attack paths exceed the cap of {cap}")]
    PathExplosion { paths: u128, cap: u64 },
}
