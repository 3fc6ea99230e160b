//! Proptest strategies producing small, valid threat models.
//!
//! Every generated model has one asset, one scenario, an adversarial and
//! a non-adversarial source, and a tree of 1..=3 objectives with 1..=2
//! techniques each and 1..=3 vectors per technique. Vectors carry both a
//! skill requirement and an inherent likelihood so either source can be
//! assessed. Control effects never raise a residual.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;
use proptest::sample::Index;

use crate::impact::derive_scenario_impact;
use crate::level::Level;
use crate::model::*;

pub const SCENARIO: &str = "S1";
pub const ADVERSARY: &str = "adversary";
pub const ACCIDENT: &str = "accident";

pub fn level() -> impl Strategy<Value = Level> {
    prop::sample::select(Level::ALL.to_vec())
}

/// (skill_required, inherent_likelihood, baseline_residual)
type VectorSpec = (Level, Level, Level);
type TreeSpec = Vec<Vec<Vec<VectorSpec>>>;
type ControlSpec = Vec<(Index, Level)>;

#[derive(Debug, Clone)]
struct Spec {
    capability: Level,
    scope: u8,
    tree: TreeSpec,
    controls: Vec<ControlSpec>,
    adversarial_impact: Level,
    accidental_impact: Level,
}

pub fn small_model() -> impl Strategy<Value = ThreatModel> {
    let vector = (level(), level(), level());
    let tree = prop::collection::vec(prop::collection::vec(prop::collection::vec(vector, 1..=3), 1..=2), 1..=3);
    let controls = prop::collection::vec(prop::collection::vec((any::<Index>(), level()), 1..=3), 0..=4);
    (level(), 0u8..3, tree, controls, level(), level()).prop_map(|(capability, scope, tree, controls, a, b)| {
        build(Spec { capability, scope, tree, controls, adversarial_impact: a, accidental_impact: b })
    })
}

/// A model with two nested control sets: the first is a subset of the second.
pub fn model_with_nested_controls() -> impl Strategy<Value = (ThreatModel, Vec<String>, Vec<String>)> {
    (small_model(), any::<u8>(), any::<u8>()).prop_map(|(model, outer, inner)| {
        let pick = |mask: u8| -> Vec<String> {
            model.controls.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, c)| c.id.clone()).collect()
        };
        let larger = pick(outer);
        let smaller = pick(outer & inner);
        (model, smaller, larger)
    })
}

fn build(spec: Spec) -> ThreatModel {
    let sources = vec![
        ThreatSource {
            id: ADVERSARY.into(),
            name: "Adversary".into(),
            category: SourceCategory::Individual,
            subtype: "Outsider".into(),
            nature: Nature::Adversarial,
            capability: Some(spec.capability),
        },
        ThreatSource {
            id: ACCIDENT.into(),
            name: "Accident".into(),
            category: SourceCategory::Accidental,
            subtype: "User error".into(),
            nature: Nature::NonAdversarial,
            capability: None,
        },
    ];
    let in_scope_sources: Vec<String> = match spec.scope {
        0 => vec![ADVERSARY.into()],
        1 => vec![ACCIDENT.into()],
        _ => vec![ADVERSARY.into(), ACCIDENT.into()],
    };
    let impact_matrix = vec![
        ImpactCell {
            asset: "A1".into(),
            dimension: CiaDimension::Integrity,
            source: SourceKey::Nature(Nature::Adversarial),
            rating: spec.adversarial_impact.into(),
        },
        ImpactCell {
            asset: "A1".into(),
            dimension: CiaDimension::Integrity,
            source: SourceKey::Category(SourceCategory::Accidental),
            rating: spec.accidental_impact.into(),
        },
    ];
    let mut scenario = ImpactScenario {
        id: SCENARIO.into(),
        asset: "A1".into(),
        dimensions: vec![CiaDimension::Integrity],
        description: "Generated scenario".into(),
        impact: Level::Low,
        in_scope_sources,
    };
    scenario.impact = derive_scenario_impact(&scenario, &impact_matrix, &sources).unwrap_or(Level::Low);

    let mut trees = Trees::default();
    for (oi, techniques) in spec.tree.iter().enumerate() {
        let oid = format!("o{oi}");
        trees.objectives.push(Objective {
            id: oid.clone(),
            name: format!("Objective {oi}"),
            scenario: SCENARIO.into(),
            applies_to: None,
        });
        for (ti, vectors) in techniques.iter().enumerate() {
            let tid = format!("{oid}-t{ti}");
            trees.techniques.push(Technique {
                id: tid.clone(),
                name: format!("Technique {oi}.{ti}"),
                objective: oid.clone(),
                catalog_refs: Vec::new(),
            });
            for (vi, (skill, inherent, baseline)) in vectors.iter().enumerate() {
                trees.vectors.push(AttackVector {
                    id: format!("{tid}-v{vi}"),
                    name: format!("Vector {oi}.{ti}.{vi}"),
                    technique: tid.clone(),
                    skill_required: Some(*skill),
                    inherent_likelihood: Some(*inherent),
                    baseline_residual: *baseline,
                    notes: String::new(),
                });
            }
        }
    }

    let controls: Vec<Control> = spec
        .controls
        .iter()
        .enumerate()
        .map(|(ci, effects)| {
            let mut seen: Vec<String> = Vec::new();
            let effects = effects
                .iter()
                .filter_map(|(idx, residual)| {
                    let v = idx.get(&trees.vectors);
                    if seen.contains(&v.id) {
                        return None;
                    }
                    seen.push(v.id.clone());
                    Some(ControlEffect { vector: v.id.clone(), residual: (*residual).min(v.baseline_residual) })
                })
                .collect();
            Control { id: format!("c{ci}"), name: format!("Control {ci}"), description: String::new(), effects }
        })
        .collect();

    let configurations = vec![
        Configuration { id: DEFAULT_CONFIGURATION.into(), name: "Default".into(), enabled_controls: Vec::new() },
        Configuration {
            id: "all".into(),
            name: "All controls".into(),
            enabled_controls: controls.iter().map(|c| c.id.clone()).collect(),
        },
    ];

    ThreatModel {
        matra_version: FORMAT_VERSION.to_string(),
        metadata: Metadata { name: "generated".into(), version: "0".into(), description: String::new() },
        assets: vec![Asset { id: "A1".into(), name: "Asset".into(), description: String::new() }],
        threat_sources: sources,
        impact_matrix,
        scenarios: vec![scenario],
        trees,
        controls,
        configurations,
        catalog: Catalog::default(),
    }
}
