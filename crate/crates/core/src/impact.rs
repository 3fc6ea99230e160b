//! Scenario impact from the business impact matrix.

use alloc::string::ToString;

use crate::error::EngineError;
use crate::level::Level;
use crate::model::{ImpactCell, ImpactScenario, SourceKey, ThreatSource};

/// Rating of one (asset, dimension) cell row for one source.
///
/// A cell keyed by the source's own id wins outright. Otherwise every
/// generic key that matches (all, nature, category) is considered and the
/// highest applicable rating is taken. `None` means no impact pathway.
pub fn source_impact(
    matrix: &[ImpactCell],
    asset: &str,
    dimension: crate::model::CiaDimension,
    source: &ThreatSource,
) -> Option<Level> {
    let mut row = matrix.iter().filter(|c| c.asset == asset && c.dimension == dimension);
    if let Some(specific) = row.clone().find(|c| matches!(&c.source, SourceKey::Source(id) if *id == source.id)) {
        return specific.rating.level();
    }
    row.by_ref()
        .filter(|c| !matches!(c.source, SourceKey::Source(_)) && c.source.matches(source))
        .filter_map(|c| c.rating.level())
        .max()
}

/// Highest assessed impact across the scenario's dimensions and in-scope
/// sources. Sources that do not resolve are skipped.
pub fn derive_scenario_impact(
    scenario: &ImpactScenario,
    matrix: &[ImpactCell],
    sources: &[ThreatSource],
) -> Result<Level, EngineError> {
    scenario
        .in_scope_sources
        .iter()
        .filter_map(|id| sources.iter().find(|s| s.id == *id))
        .flat_map(|s| scenario.dimensions.iter().filter_map(move |d| source_impact(matrix, &scenario.asset, *d, s)))
        .max()
        .ok_or_else(|| EngineError::NoImpactBasis(scenario.id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CiaDimension::*, ImpactRating, Nature, SourceCategory};
    use alloc::string::String;
    use alloc::vec;
    use alloc::vec::Vec;

    fn source(id: &str, nature: Nature) -> ThreatSource {
        let adversarial = nature == Nature::Adversarial;
        ThreatSource {
            id: id.into(),
            name: id.into(),
            category: if adversarial { SourceCategory::Organisation } else { SourceCategory::Accidental },
            subtype: String::new(),
            nature,
            capability: adversarial.then_some(Level::Low),
        }
    }

    fn cell(asset: &str, dimension: crate::model::CiaDimension, key: &str, rating: ImpactRating) -> ImpactCell {
        ImpactCell { asset: asset.into(), dimension, source: SourceKey::parse(key).unwrap(), rating }
    }

    fn scenario(asset: &str, dims: Vec<crate::model::CiaDimension>, sources: &[&str]) -> ImpactScenario {
        ImpactScenario {
            id: "IS".into(),
            asset: asset.into(),
            dimensions: dims,
            description: String::new(),
            impact: Level::Low,
            in_scope_sources: sources.iter().map(|s| (*s).into()).collect(),
        }
    }

    fn sources() -> Vec<ThreatSource> {
        vec![source("customer", Nature::Adversarial), source("accidental", Nature::NonAdversarial)]
    }

    #[test]
    fn database_confidentiality_is_high() {
        let m = [
            cell("A6", Confidentiality, "adversarial", ImpactRating::High),
            cell("A6", Confidentiality, "accidental", ImpactRating::NotApplicable),
        ];
        let s = scenario("A6", vec![Confidentiality], &["customer", "accidental"]);
        assert_eq!(derive_scenario_impact(&s, &m, &sources()), Ok(Level::High));
    }

    #[test]
    fn memory_integrity_is_moderate() {
        let m = [
            cell("A4", Integrity, "adversarial", ImpactRating::Moderate),
            cell("A4", Integrity, "accidental", ImpactRating::Moderate),
        ];
        let s = scenario("A4", vec![Integrity], &["customer", "accidental"]);
        assert_eq!(derive_scenario_impact(&s, &m, &sources()), Ok(Level::Moderate));
    }

    #[test]
    fn all_not_applicable_has_no_basis() {
        let m = [
            cell("A1", Integrity, "adversarial", ImpactRating::NotApplicable),
            cell("A1", Integrity, "accidental", ImpactRating::NotApplicable),
        ];
        let s = scenario("A1", vec![Integrity], &["customer", "accidental"]);
        assert_eq!(derive_scenario_impact(&s, &m, &sources()), Err(EngineError::NoImpactBasis("IS".into())));
    }

    #[test]
    fn specific_source_cell_wins() {
        let m = [
            cell("A1", Confidentiality, "adversarial", ImpactRating::High),
            cell("A1", Confidentiality, "source:customer", ImpactRating::Low),
        ];
        let s = scenario("A1", vec![Confidentiality], &["customer"]);
        assert_eq!(derive_scenario_impact(&s, &m, &sources()), Ok(Level::Low));
    }

    #[test]
    fn generic_not_applicable_does_not_mask_all_column() {
        let m = [
            cell("A6", Availability, "adversarial", ImpactRating::NotApplicable),
            cell("A6", Availability, "all", ImpactRating::High),
        ];
        let s = scenario("A6", vec![Availability], &["customer"]);
        assert_eq!(derive_scenario_impact(&s, &m, &sources()), Ok(Level::High));
    }

    #[test]
    fn maximum_over_dimensions() {
        let m = [
            cell("A7", Confidentiality, "adversarial", ImpactRating::Moderate),
            cell("A7", Integrity, "adversarial", ImpactRating::High),
        ];
        let s = scenario("A7", vec![Confidentiality, Integrity], &["customer"]);
        assert_eq!(derive_scenario_impact(&s, &m, &sources()), Ok(Level::High));
    }

    #[test]
    fn out_of_scope_sources_do_not_contribute() {
        let m = [
            cell("A2", Integrity, "adversarial", ImpactRating::High),
            cell("A2", Integrity, "accidental", ImpactRating::Moderate),
        ];
        let s = scenario("A2", vec![Integrity], &["accidental"]);
        assert_eq!(derive_scenario_impact(&s, &m, &sources()), Ok(Level::Moderate));
    }
}
