//! Structural domain types of a threat model document.
//!
//! Everything here is plain data: ids are human-readable slugs and the
//! attack trees are stored flat, each node pointing at its parent by id.
//! Use [`ThreatModel::check_references`] to confirm referential closure
//! before handing a model to the engine.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::level::Level;

/// Version tag every document must carry.
pub const FORMAT_VERSION: &str = "1";

/// Id of the configuration used when none is requested.
pub const DEFAULT_CONFIGURATION: &str = "default";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nature {
    Adversarial,
    NonAdversarial,
}

impl Nature {
    pub const fn as_str(self) -> &'static str {
        match self {
            Nature::Adversarial => "adversarial",
            Nature::NonAdversarial => "non_adversarial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceCategory {
    Individual,
    Group,
    Organisation,
    NationState,
    Accidental,
}

impl SourceCategory {
    pub const ALL: [SourceCategory; 5] = [
        SourceCategory::Individual,
        SourceCategory::Group,
        SourceCategory::Organisation,
        SourceCategory::NationState,
        SourceCategory::Accidental,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            SourceCategory::Individual => "individual",
            SourceCategory::Group => "group",
            SourceCategory::Organisation => "organisation",
            SourceCategory::NationState => "nation_state",
            SourceCategory::Accidental => "accidental",
        }
    }

    /// Accidental is the only non-adversarial category.
    pub const fn nature(self) -> Nature {
        match self {
            SourceCategory::Accidental => Nature::NonAdversarial,
            _ => Nature::Adversarial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreatSource {
    pub id: String,
    pub name: String,
    pub category: SourceCategory,
    pub subtype: String,
    pub nature: Nature,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capability: Option<Level>,
}

impl ThreatSource {
    pub fn is_adversarial(&self) -> bool {
        self.nature == Nature::Adversarial
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Asset {
    pub id: String,
    pub name: String,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiaDimension {
    Confidentiality,
    Integrity,
    Availability,
}

impl CiaDimension {
    pub const ALL: [CiaDimension; 3] =
        [CiaDimension::Confidentiality, CiaDimension::Integrity, CiaDimension::Availability];

    pub const fn letter(self) -> &'static str {
        match self {
            CiaDimension::Confidentiality => "C",
            CiaDimension::Integrity => "I",
            CiaDimension::Availability => "A",
        }
    }
}

/// Who an impact cell applies to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SourceKey {
    /// Every threat source, e.g. availability impact that does not depend on
    /// who causes it.
    All,
    Nature(Nature),
    Category(SourceCategory),
    /// A single declared threat source. Takes precedence over the other keys.
    Source(String),
}

impl SourceKey {
    pub fn matches(&self, source: &ThreatSource) -> bool {
        match self {
            SourceKey::All => true,
            SourceKey::Nature(n) => source.nature == *n,
            SourceKey::Category(c) => source.category == *c,
            SourceKey::Source(id) => source.id == *id,
        }
    }

    pub fn parse(s: &str) -> Result<SourceKey, String> {
        if let Some(id) = s.strip_prefix("source:") {
            if id.is_empty() {
                return Err("empty source id in impact key".to_string());
            }
            return Ok(SourceKey::Source(id.to_string()));
        }
        match s {
            "all" => Ok(SourceKey::All),
            "adversarial" => Ok(SourceKey::Nature(Nature::Adversarial)),
            "non_adversarial" => Ok(SourceKey::Nature(Nature::NonAdversarial)),
            other => SourceCategory::ALL
                .into_iter()
                .find(|c| c.as_str() == other)
                .map(SourceKey::Category)
                .ok_or_else(|| format!("unknown impact source key `{other}`")),
        }
    }
}

impl fmt::Display for SourceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceKey::All => f.write_str("all"),
            SourceKey::Nature(n) => f.write_str(n.as_str()),
            SourceKey::Category(c) => f.write_str(c.as_str()),
            SourceKey::Source(id) => write!(f, "source:{id}"),
        }
    }
}

impl TryFrom<String> for SourceKey {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        SourceKey::parse(&s)
    }
}

impl From<SourceKey> for String {
    fn from(k: SourceKey) -> String {
        k.to_string()
    }
}

/// A business impact rating, or the explicit absence of an impact pathway.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImpactRating {
    Low,
    Moderate,
    High,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl ImpactRating {
    pub fn level(self) -> Option<Level> {
        match self {
            ImpactRating::Low => Some(Level::Low),
            ImpactRating::Moderate => Some(Level::Moderate),
            ImpactRating::High => Some(Level::High),
            ImpactRating::NotApplicable => None,
        }
    }
}

impl From<Level> for ImpactRating {
    fn from(l: Level) -> Self {
        match l {
            Level::Low => ImpactRating::Low,
            Level::Moderate => ImpactRating::Moderate,
            Level::High => ImpactRating::High,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpactCell {
    pub asset: String,
    pub dimension: CiaDimension,
    pub source: SourceKey,
    pub rating: ImpactRating,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpactScenario {
    pub id: String,
    pub asset: String,
    pub dimensions: Vec<CiaDimension>,
    pub description: String,
    pub impact: Level,
    pub in_scope_sources: Vec<String>,
}

impl ImpactScenario {
    pub fn in_scope(&self, source: &str) -> bool {
        self.in_scope_sources.iter().any(|s| s == source)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Objective {
    pub id: String,
    pub name: String,
    pub scenario: String,
    /// Restricts the objective to sources of one nature. Absent means it
    /// applies to every source in scope.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub applies_to: Option<Nature>,
}

impl Objective {
    pub fn applies(&self, nature: Nature) -> bool {
        self.applies_to.is_none_or(|n| n == nature)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Technique {
    pub id: String,
    pub name: String,
    pub objective: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub catalog_refs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackVector {
    pub id: String,
    pub name: String,
    pub technique: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skill_required: Option<Level>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inherent_likelihood: Option<Level>,
    pub baseline_residual: Level,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlEffect {
    pub vector: String,
    pub residual: Level,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Control {
    pub id: String,
    pub name: String,
    pub description: String,
    pub effects: Vec<ControlEffect>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Configuration {
    pub id: String,
    pub name: String,
    pub enabled_controls: Vec<String>,
}

impl Configuration {
    pub const AD_HOC: &'static str = "ad-hoc";

    /// An unnamed control set, as toggled interactively.
    pub fn ad_hoc<I, S>(controls: I) -> Configuration
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut enabled_controls: Vec<String> = controls.into_iter().map(Into::into).collect();
        enabled_controls.sort();
        enabled_controls.dedup();
        Configuration { id: Configuration::AD_HOC.to_string(), name: "Ad hoc".to_string(), enabled_controls }
    }

    pub fn is_enabled(&self, control: &str) -> bool {
        self.enabled_controls.iter().any(|c| c == control)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub name: String,
    pub version: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
}

/// Flat storage of every scenario's attack tree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trees {
    pub objectives: Vec<Objective>,
    pub techniques: Vec<Technique>,
    pub vectors: Vec<AttackVector>,
}

/// Reference decomposition an analyst draws trees from. Unscored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Catalog {
    #[serde(default)]
    pub objectives: Vec<CatalogObjective>,
    #[serde(default)]
    pub techniques: Vec<CatalogTechnique>,
}

impl Catalog {
    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty() && self.techniques.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogObjective {
    pub id: String,
    pub name: String,
    /// Impact dimensions the objective is part of.
    pub dimensions: Vec<CiaDimension>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub applies_to: Option<Nature>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogTechnique {
    pub id: String,
    pub name: String,
    pub objective: String,
    pub vectors: Vec<CatalogVector>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogVector {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreatModel {
    pub matra_version: String,
    pub metadata: Metadata,
    pub assets: Vec<Asset>,
    pub threat_sources: Vec<ThreatSource>,
    pub impact_matrix: Vec<ImpactCell>,
    pub scenarios: Vec<ImpactScenario>,
    pub trees: Trees,
    pub controls: Vec<Control>,
    pub configurations: Vec<Configuration>,
    #[serde(default, skip_serializing_if = "Catalog::is_empty")]
    pub catalog: Catalog,
}

/// A failed cross-reference or a repeated id, with its document path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReferenceProblem {
    Duplicate { location: String, id: String },
    Dangling { location: String, id: String },
}

impl ReferenceProblem {
    pub fn location(&self) -> &str {
        match self {
            ReferenceProblem::Duplicate { location, .. } | ReferenceProblem::Dangling { location, .. } => location,
        }
    }
}

impl fmt::Display for ReferenceProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReferenceProblem::Duplicate { location, id } => write!(f, "{location}: duplicate id `{id}`"),
            ReferenceProblem::Dangling { location, id } => {
                write!(f, "{location}: reference `{id}` does not resolve")
            }
        }
    }
}

impl ThreatModel {
    pub fn asset(&self, id: &str) -> Option<&Asset> {
        self.assets.iter().find(|a| a.id == id)
    }

    pub fn source(&self, id: &str) -> Option<&ThreatSource> {
        self.threat_sources.iter().find(|s| s.id == id)
    }

    pub fn scenario(&self, id: &str) -> Option<&ImpactScenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    pub fn objective(&self, id: &str) -> Option<&Objective> {
        self.trees.objectives.iter().find(|o| o.id == id)
    }

    pub fn technique(&self, id: &str) -> Option<&Technique> {
        self.trees.techniques.iter().find(|t| t.id == id)
    }

    pub fn vector(&self, id: &str) -> Option<&AttackVector> {
        self.trees.vectors.iter().find(|v| v.id == id)
    }

    pub fn control(&self, id: &str) -> Option<&Control> {
        self.controls.iter().find(|c| c.id == id)
    }

    pub fn configuration(&self, id: &str) -> Option<&Configuration> {
        self.configurations.iter().find(|c| c.id == id)
    }

    /// The configuration named `default`, or the empty control set.
    pub fn default_configuration(&self) -> Configuration {
        self.configuration(DEFAULT_CONFIGURATION).cloned().unwrap_or_else(|| Configuration {
            id: DEFAULT_CONFIGURATION.to_string(),
            name: "Default".to_string(),
            enabled_controls: Vec::new(),
        })
    }

    pub fn objectives_of<'a>(&'a self, scenario: &'a str) -> impl Iterator<Item = &'a Objective> + 'a {
        self.trees.objectives.iter().filter(move |o| o.scenario == scenario)
    }

    pub fn techniques_of<'a>(&'a self, objective: &'a str) -> impl Iterator<Item = &'a Technique> + 'a {
        self.trees.techniques.iter().filter(move |t| t.objective == objective)
    }

    pub fn vectors_of<'a>(&'a self, technique: &'a str) -> impl Iterator<Item = &'a AttackVector> + 'a {
        self.trees.vectors.iter().filter(move |v| v.technique == technique)
    }

    /// Vectors under every technique of an objective, in document order of
    /// techniques and then vectors.
    pub fn vectors_under<'a>(&'a self, objective: &'a str) -> impl Iterator<Item = &'a AttackVector> + 'a {
        self.techniques_of(objective).flat_map(move |t| self.vectors_of(&t.id))
    }

    /// The scenario a vector belongs to, if its parent chain resolves.
    pub fn scenario_of_vector(&self, vector: &AttackVector) -> Option<&ImpactScenario> {
        let technique = self.technique(&vector.technique)?;
        let objective = self.objective(&technique.objective)?;
        self.scenario(&objective.scenario)
    }

    pub fn has_tree(&self, scenario: &str) -> bool {
        self.objectives_of(scenario).next().is_some()
    }

    /// In-scope sources of a scenario that at least one objective applies to.
    pub fn assessable_sources<'a>(&'a self, scenario: &'a ImpactScenario) -> Vec<&'a ThreatSource> {
        scenario
            .in_scope_sources
            .iter()
            .filter_map(|id| self.source(id))
            .filter(|s| self.objectives_of(&scenario.id).any(|o| o.applies(s.nature)))
            .collect()
    }

    /// All duplicate ids and unresolved references, in document order.
    pub fn reference_problems(&self) -> Vec<ReferenceProblem> {
        let mut out = Vec::new();

        duplicates(&mut out, "assets", self.assets.iter().map(|a| a.id.as_str()));
        duplicates(&mut out, "threat_sources", self.threat_sources.iter().map(|s| s.id.as_str()));
        duplicates(&mut out, "scenarios", self.scenarios.iter().map(|s| s.id.as_str()));
        duplicates(&mut out, "trees.objectives", self.trees.objectives.iter().map(|o| o.id.as_str()));
        duplicates(&mut out, "trees.techniques", self.trees.techniques.iter().map(|t| t.id.as_str()));
        duplicates(&mut out, "trees.vectors", self.trees.vectors.iter().map(|v| v.id.as_str()));
        duplicates(&mut out, "controls", self.controls.iter().map(|c| c.id.as_str()));
        duplicates(&mut out, "configurations", self.configurations.iter().map(|c| c.id.as_str()));
        duplicates(&mut out, "catalog.objectives", self.catalog.objectives.iter().map(|o| o.id.as_str()));
        duplicates(&mut out, "catalog.techniques", self.catalog.techniques.iter().map(|t| t.id.as_str()));

        let mut dangling = |location: String, id: &str, ok: bool| {
            if !ok {
                out.push(ReferenceProblem::Dangling { location, id: id.to_string() });
            }
        };

        for (i, c) in self.impact_matrix.iter().enumerate() {
            dangling(format!("impact_matrix[{i}].asset"), &c.asset, self.asset(&c.asset).is_some());
            if let SourceKey::Source(id) = &c.source {
                dangling(format!("impact_matrix[{i}].source"), id, self.source(id).is_some());
            }
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            dangling(format!("scenarios[{i}].asset"), &s.asset, self.asset(&s.asset).is_some());
            for (j, src) in s.in_scope_sources.iter().enumerate() {
                dangling(format!("scenarios[{i}].in_scope_sources[{j}]"), src, self.source(src).is_some());
            }
        }
        for (i, o) in self.trees.objectives.iter().enumerate() {
            dangling(format!("trees.objectives[{i}].scenario"), &o.scenario, self.scenario(&o.scenario).is_some());
        }
        for (i, t) in self.trees.techniques.iter().enumerate() {
            dangling(format!("trees.techniques[{i}].objective"), &t.objective, self.objective(&t.objective).is_some());
        }
        for (i, v) in self.trees.vectors.iter().enumerate() {
            dangling(format!("trees.vectors[{i}].technique"), &v.technique, self.technique(&v.technique).is_some());
        }
        for (i, c) in self.controls.iter().enumerate() {
            for (j, e) in c.effects.iter().enumerate() {
                dangling(format!("controls[{i}].effects[{j}].vector"), &e.vector, self.vector(&e.vector).is_some());
            }
        }
        for (i, c) in self.configurations.iter().enumerate() {
            for (j, id) in c.enabled_controls.iter().enumerate() {
                dangling(format!("configurations[{i}].enabled_controls[{j}]"), id, self.control(id).is_some());
            }
        }
        for (i, t) in self.catalog.techniques.iter().enumerate() {
            let ok = self.catalog.objectives.iter().any(|o| o.id == t.objective);
            dangling(format!("catalog.techniques[{i}].objective"), &t.objective, ok);
        }
        out
    }

    /// First referential problem, if any.
    pub fn check_references(&self) -> Result<(), ReferenceProblem> {
        match self.reference_problems().into_iter().next() {
            Some(p) => Err(p),
            None => Ok(()),
        }
    }
}

fn duplicates<'a>(out: &mut Vec<ReferenceProblem>, section: &str, ids: impl Iterator<Item = &'a str>) {
    let ids: Vec<&str> = ids.collect();
    for (i, id) in ids.iter().enumerate() {
        if ids[..i].contains(id) {
            out.push(ReferenceProblem::Duplicate { location: format!("{section}[{i}].id"), id: (*id).to_string() });
        }
    }
}
