//! Lookup tables for capability fit, vector likelihood combination and risk.

use crate::level::{Level, RiskLabel, RiskRating};

use Level::{High, Low, Moderate};

/// Rows: adversary capability. Columns: required skill. Both Low/Mod/High.
const CAPABILITY_FIT: [[Level; 3]; 3] = [[High, Moderate, Low], [High, High, Moderate], [High, High, High]];

/// Rows: capability fit. Columns: residual success likelihood.
const COMBINATION: [[Level; 3]; 3] = [[Low, Low, Moderate], [Low, Moderate, High], [Moderate, High, High]];

/// Rows: likelihood. Columns: impact.
const RISK: [[RiskRating; 3]; 3] = [
    [
        RiskRating::from_matrix(RiskLabel::VeryLow, 1),
        RiskRating::from_matrix(RiskLabel::Low, 2),
        RiskRating::from_matrix(RiskLabel::Moderate, 3),
    ],
    [
        RiskRating::from_matrix(RiskLabel::Low, 2),
        RiskRating::from_matrix(RiskLabel::Moderate, 4),
        RiskRating::from_matrix(RiskLabel::High, 6),
    ],
    [
        RiskRating::from_matrix(RiskLabel::Moderate, 3),
        RiskRating::from_matrix(RiskLabel::High, 6),
        RiskRating::from_matrix(RiskLabel::VeryHigh, 9),
    ],
];

/// How well an adversary's capability covers a vector's skill requirement.
pub fn capability_fit(capability: Level, skill_required: Level) -> Level {
    CAPABILITY_FIT[capability.index()][skill_required.index()]
}

/// Vector likelihood for an adversarial source.
pub fn combine_adversarial(fit: Level, residual: Level) -> Level {
    COMBINATION[fit.index()][residual.index()]
}

/// Vector likelihood for a non-adversarial source: the inherent
/// manifestation likelihood caps whatever the residual allows.
pub fn combine_nonadversarial(inherent: Level, residual: Level) -> Level {
    inherent.min(residual)
}

pub fn risk_rating(likelihood: Level, impact: Level) -> RiskRating {
    RISK[likelihood.index()][impact.index()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capability_fit_examples() {
        assert_eq!(capability_fit(Low, Moderate), Moderate);
        assert_eq!(capability_fit(High, High), High);
        assert_eq!(capability_fit(Moderate, High), Moderate);
    }

    #[test]
    fn combine_adversarial_examples() {
        assert_eq!(combine_adversarial(High, Low), Moderate);
        assert_eq!(combine_adversarial(Moderate, High), High);
        assert_eq!(combine_adversarial(Moderate, Low), Low);
    }

    #[test]
    fn combine_nonadversarial_examples() {
        assert_eq!(combine_nonadversarial(Moderate, High), Moderate);
        assert_eq!(combine_nonadversarial(High, Low), Low);
        assert_eq!(combine_nonadversarial(Low, Low), Low);
    }

    #[test]
    fn risk_examples() {
        assert_eq!(risk_rating(High, High).score(), 9);
        assert_eq!(risk_rating(High, High).label(), RiskLabel::VeryHigh);
        assert_eq!(risk_rating(Moderate, High).score(), 6);
        assert_eq!(risk_rating(Low, High).label(), RiskLabel::Moderate);
        assert_eq!(risk_rating(Low, High).score(), 3);
    }

    #[test]
    fn risk_cells_are_constructible_pairs() {
        for l in Level::ALL {
            for i in Level::ALL {
                let r = risk_rating(l, i);
                assert_eq!(RiskRating::new(r.label(), r.score()), Ok(r));
                assert_eq!(r.score(), l.ordinal() * i.ordinal());
            }
        }
    }

    #[test]
    fn monotone_in_each_argument() {
        for a in Level::ALL {
            for (b0, b1) in [(Low, Moderate), (Moderate, High)] {
                assert!(capability_fit(a, b0) >= capability_fit(a, b1), "skill up, fit down");
                assert!(capability_fit(b0, a) <= capability_fit(b1, a));
                assert!(combine_adversarial(a, b0) <= combine_adversarial(a, b1));
                assert!(combine_adversarial(b0, a) <= combine_adversarial(b1, a));
                assert!(risk_rating(a, b0).score() <= risk_rating(a, b1).score());
                assert!(risk_rating(b0, a).score() <= risk_rating(b1, a).score());
            }
        }
    }
}
