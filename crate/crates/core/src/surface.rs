//! Full attack surface: how many complete attack paths reach each level.
//!
//! A complete path picks one vector per objective and is rated at the
//! minimum of its vectors' combined likelihoods. Counting is exact. The
//! number of paths rated at least `t` is the product over objectives of the
//! vectors rated at least `t`, so no path needs to be materialised.

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::level::Level;

pub const DEFAULT_PATH_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Histogram {
    pub low: u64,
    pub moderate: u64,
    pub high: u64,
}

impl Histogram {
    pub fn count(&self, level: Level) -> u64 {
        match level {
            Level::Low => self.low,
            Level::Moderate => self.moderate,
            Level::High => self.high,
        }
    }

    pub fn total(&self) -> u64 {
        self.low + self.moderate + self.high
    }

    /// Highest level with at least one path.
    pub fn top(&self) -> Option<Level> {
        Level::ALL.into_iter().rev().find(|l| self.count(*l) > 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceProfile {
    pub path_count: u64,
    pub histogram: Histogram,
}

/// `objectives[i]` holds the combined likelihoods of every vector under
/// objective `i`. Refuses with `PathExplosion` once the path count exceeds
/// `cap`.
pub fn attack_surface<O>(objectives: &[O], cap: u64) -> Result<SurfaceProfile, EngineError>
where
    O: AsRef<[Level]>,
{
    if objectives.is_empty() {
        return Err(EngineError::EmptyAggregation);
    }
    let at_least = |t: Level| -> u128 {
        objectives
            .iter()
            .map(|o| o.as_ref().iter().filter(|l| **l >= t).count() as u128)
            .try_fold(1u128, |acc, n| acc.checked_mul(n))
            .unwrap_or(u128::MAX)
    };
    let total = at_least(Level::Low);
    if total > u128::from(cap) {
        return Err(EngineError::PathExplosion { paths: total, cap });
    }
    let moderate_up = at_least(Level::Moderate);
    let high = at_least(Level::High);
    // total <= cap <= u64::MAX, so the narrowing below is lossless.
    Ok(SurfaceProfile {
        path_count: total as u64,
        histogram: Histogram {
            low: (total - moderate_up) as u64,
            moderate: (moderate_up - high) as u64,
            high: high as u64,
        },
    })
}
