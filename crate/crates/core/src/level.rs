//! The three-grade ordinal scale and the five-grade risk rating.

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;

/// Ordinal grade shared by capability, skill, residual, inherent, combined
/// likelihood and impact. The role is carried by the field name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Low,
    Moderate,
    High,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Low, Level::Moderate, Level::High];

    /// Row/column index into the lookup tables.
    pub const fn index(self) -> usize {
        match self {
            Level::Low => 0,
            Level::Moderate => 1,
            Level::High => 2,
        }
    }

    /// 1-based ordinal used by the risk matrix (`score = likelihood * impact`).
    pub const fn ordinal(self) -> u8 {
        self.index() as u8 + 1
    }

    /// Short label used in annotated trees ("Low", "Mod", "High").
    pub const fn abbrev(self) -> &'static str {
        match self {
            Level::Low => "Low",
            Level::Moderate => "Mod",
            Level::High => "High",
        }
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            Level::Low => "Low",
            Level::Moderate => "Moderate",
            Level::High => "High",
        }
    }

    pub fn parse(s: &str) -> Option<Level> {
        match s {
            "low" | "Low" => Some(Level::Low),
            "moderate" | "Moderate" | "mod" | "Mod" => Some(Level::Moderate),
            "high" | "High" => Some(Level::High),
            _ => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Order-maximum of a nonempty sequence of levels.
pub fn level_max<I: IntoIterator<Item = Level>>(values: I) -> Result<Level, EngineError> {
    values.into_iter().max().ok_or(EngineError::EmptyAggregation)
}

/// Order-minimum of a nonempty sequence of levels.
pub fn level_min<I: IntoIterator<Item = Level>>(values: I) -> Result<Level, EngineError> {
    values.into_iter().min().ok_or(EngineError::EmptyAggregation)
}

/// Risk label of the 3x3 risk matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskLabel {
    VeryLow,
    Low,
    Moderate,
    High,
    VeryHigh,
}

impl RiskLabel {
    pub const fn as_str(self) -> &'static str {
        match self {
            RiskLabel::VeryLow => "Very Low",
            RiskLabel::Low => "Low",
            RiskLabel::Moderate => "Moderate",
            RiskLabel::High => "High",
            RiskLabel::VeryHigh => "Very High",
        }
    }

    fn admits(self, score: u8) -> bool {
        matches!(
            (self, score),
            (RiskLabel::VeryLow, 1)
                | (RiskLabel::Low, 2)
                | (RiskLabel::Moderate, 3)
                | (RiskLabel::Moderate, 4)
                | (RiskLabel::High, 6)
                | (RiskLabel::VeryHigh, 9)
        )
    }
}

impl fmt::Display for RiskLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A cell of the risk matrix. Only the (label, score) pairs that occur in
/// the matrix can be constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRisk", into = "RawRisk")]
pub struct RiskRating {
    label: RiskLabel,
    score: u8,
}

impl RiskRating {
    pub fn new(label: RiskLabel, score: u8) -> Result<Self, EngineError> {
        if label.admits(score) {
            Ok(RiskRating { label, score })
        } else {
            Err(EngineError::InvalidRisk { label, score })
        }
    }

    pub(crate) const fn from_matrix(label: RiskLabel, score: u8) -> Self {
        RiskRating { label, score }
    }

    pub fn label(&self) -> RiskLabel {
        self.label
    }

    pub fn score(&self) -> u8 {
        self.score
    }
}

impl fmt::Display for RiskRating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.label, self.score)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRisk {
    label: RiskLabel,
    score: u8,
}

impl TryFrom<RawRisk> for RiskRating {
    type Error = EngineError;

    fn try_from(raw: RawRisk) -> Result<Self, Self::Error> {
        RiskRating::new(raw.label, raw.score)
    }
}

impl From<RiskRating> for RawRisk {
    fn from(r: RiskRating) -> Self {
        RawRisk { label: r.label, score: r.score }
    }
}
