use matra_core::arbitrary::{small_model, ACCIDENT, ADVERSARY};
use matra_core::model::{
    CiaDimension, ControlEffect, ImpactCell, Nature, SourceCategory, SourceKey, Technique, ThreatModel,
};
use matra_core::validate::codes;
use matra_core::{validate_model, Level, Severity};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

/// A fixed valid model with both sources in scope and at least one control.
fn base() -> ThreatModel {
    let mut runner = TestRunner::deterministic();
    loop {
        let mut m = small_model().new_tree(&mut runner).unwrap().current();
        if m.controls.iter().all(|c| c.effects.is_empty()) {
            continue;
        }
        m.scenarios[0].in_scope_sources = vec![ADVERSARY.into(), ACCIDENT.into()];
        m.scenarios[0].impact =
            matra_core::impact::derive_scenario_impact(&m.scenarios[0], &m.impact_matrix, &m.threat_sources).unwrap();
        return m;
    }
}

fn assert_error(model: &ThreatModel, code: &str) {
    let report = validate_model(model);
    assert!(report.errors().any(|f| f.code == code), "expected `{code}`, got {:#?}", report.findings);
    assert!(!report.is_evaluable());
}

#[test]
fn base_model_is_clean() {
    let report = validate_model(&base());
    assert_eq!(report.errors().count(), 0, "{:#?}", report.findings);
}

#[test]
fn unsupported_version() {
    let mut m = base();
    m.matra_version = "2".into();
    assert_error(&m, codes::UNSUPPORTED_VERSION);
}

#[test]
fn duplicate_id() {
    let mut m = base();
    let v = m.trees.vectors[0].clone();
    m.trees.vectors.push(v);
    assert_error(&m, codes::DUPLICATE_ID);
}

#[test]
fn dangling_reference() {
    let mut m = base();
    m.trees.vectors[0].technique = "T99".into();
    assert_error(&m, codes::DANGLING_REFERENCE);
    let report = validate_model(&m);
    let f = report.errors().find(|f| f.code == codes::DANGLING_REFERENCE).unwrap();
    assert_eq!(f.location, "trees.vectors[0].technique");
}

#[test]
fn source_capability() {
    let mut m = base();
    m.threat_sources[0].capability = None;
    assert_error(&m, codes::SOURCE_CAPABILITY);
    let mut m = base();
    m.threat_sources[1].capability = Some(Level::Low);
    assert_error(&m, codes::SOURCE_CAPABILITY);
}

#[test]
fn source_category() {
    let mut m = base();
    m.threat_sources[0].category = SourceCategory::Accidental;
    assert_error(&m, codes::SOURCE_CATEGORY);
    let mut m = base();
    m.threat_sources[1].nature = Nature::Adversarial;
    m.threat_sources[1].capability = Some(Level::Low);
    assert_error(&m, codes::SOURCE_CATEGORY);
}

#[test]
fn duplicate_impact_cell() {
    let mut m = base();
    let c = m.impact_matrix[0].clone();
    m.impact_matrix.push(c);
    assert_error(&m, codes::DUPLICATE_IMPACT_CELL);
}

#[test]
fn empty_dimensions() {
    let mut m = base();
    m.scenarios[0].dimensions.clear();
    assert_error(&m, codes::EMPTY_DIMENSIONS);
}

#[test]
fn empty_scope() {
    let mut m = base();
    m.scenarios[0].in_scope_sources.clear();
    assert_error(&m, codes::EMPTY_SCOPE);
}

#[test]
fn no_impact_basis() {
    let mut m = base();
    m.scenarios[0].dimensions = vec![CiaDimension::Availability];
    assert_error(&m, codes::NO_IMPACT_BASIS);
}

#[test]
fn impact_mismatch() {
    let mut m = base();
    m.impact_matrix = vec![ImpactCell {
        asset: "A1".into(),
        dimension: CiaDimension::Integrity,
        source: SourceKey::All,
        rating: Level::Moderate.into(),
    }];
    m.scenarios[0].impact = Level::High;
    assert_error(&m, codes::IMPACT_MISMATCH);
}

#[test]
fn empty_objective() {
    let mut m = base();
    let oid = m.trees.objectives[0].id.clone();
    let techniques: Vec<String> =
        m.trees.techniques.iter().filter(|t| t.objective == oid).map(|t| t.id.clone()).collect();
    m.trees.techniques.retain(|t| t.objective != oid);
    m.trees.vectors.retain(|v| !techniques.contains(&v.technique));
    let remaining: Vec<String> = m.trees.vectors.iter().map(|v| v.id.clone()).collect();
    for c in &mut m.controls {
        c.effects.retain(|e| remaining.contains(&e.vector));
    }
    assert_error(&m, codes::EMPTY_OBJECTIVE);
}

#[test]
fn empty_technique() {
    let mut m = base();
    let objective = m.trees.objectives[0].id.clone();
    m.trees.techniques.push(Technique { id: "bare".into(), name: "Bare".into(), objective, catalog_refs: Vec::new() });
    assert_error(&m, codes::EMPTY_TECHNIQUE);
}

#[test]
fn missing_skill() {
    let mut m = base();
    m.trees.vectors[0].skill_required = None;
    assert_error(&m, codes::MISSING_SKILL);

    // Not an error once no adversarial source can reach the vector.
    m.scenarios[0].in_scope_sources = vec![ACCIDENT.into()];
    m.scenarios[0].impact =
        matra_core::impact::derive_scenario_impact(&m.scenarios[0], &m.impact_matrix, &m.threat_sources).unwrap();
    assert!(!validate_model(&m).has_code(codes::MISSING_SKILL));
}

#[test]
fn missing_inherent() {
    let mut m = base();
    m.trees.vectors[0].inherent_likelihood = None;
    assert_error(&m, codes::MISSING_INHERENT);
}

#[test]
fn control_raises_residual() {
    let mut m = base();
    let v = &mut m.trees.vectors[0];
    v.baseline_residual = Level::Low;
    let id = v.id.clone();
    m.controls[0].effects.push(ControlEffect { vector: id, residual: Level::High });
    assert_error(&m, codes::CONTROL_RAISES_RESIDUAL);
}

#[test]
fn every_error_code_has_a_fixture() {
    // Keep in step with the fixtures above.
    let covered = [
        codes::UNSUPPORTED_VERSION,
        codes::DUPLICATE_ID,
        codes::DANGLING_REFERENCE,
        codes::SOURCE_CAPABILITY,
        codes::SOURCE_CATEGORY,
        codes::DUPLICATE_IMPACT_CELL,
        codes::EMPTY_DIMENSIONS,
        codes::EMPTY_SCOPE,
        codes::NO_IMPACT_BASIS,
        codes::IMPACT_MISMATCH,
        codes::EMPTY_OBJECTIVE,
        codes::EMPTY_TECHNIQUE,
        codes::MISSING_SKILL,
        codes::MISSING_INHERENT,
        codes::CONTROL_RAISES_RESIDUAL,
    ];
    for code in codes::ERRORS {
        assert!(covered.contains(&code), "no fixture for {code}");
    }
}

#[test]
fn all_problems_are_reported_at_once() {
    let mut m = base();
    m.matra_version = "0".into();
    m.trees.vectors[0].technique = "T99".into();
    m.scenarios[0].dimensions.clear();
    let report = validate_model(&m);
    for code in [codes::UNSUPPORTED_VERSION, codes::DANGLING_REFERENCE, codes::EMPTY_DIMENSIONS] {
        assert!(report.has_code(code), "{code} missing");
    }
}

#[test]
fn warnings_do_not_block_evaluation() {
    let mut m = base();
    for c in &mut m.controls {
        c.effects.clear();
    }
    let report = validate_model(&m);
    assert!(report.has_code(codes::VECTOR_UNCONTROLLED));
    assert!(report
        .findings
        .iter()
        .filter(|f| f.code == codes::VECTOR_UNCONTROLLED)
        .all(|f| f.severity == Severity::Warning));
    assert!(report.is_evaluable());
}
