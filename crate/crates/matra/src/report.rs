//! Annotated text trees, Graphviz DOT graphs and risk tables.

use std::fmt::Write as _;

use matra_core::engine::{assess, assessable_pairs, resolve_configuration, Assessment, VectorScore};
use matra_core::model::ThreatModel;
use matra_core::{EngineError, Level, RiskLabel};
use thiserror::Error;

/// At most this many configurations annotate one rendered tree.
pub const MAX_TREE_CONFIGURATIONS: usize = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("nothing to render")]
    Empty,
    #[error("assessments cover more than one scenario or threat source")]
    MixedScenario,
    #[error("a tree annotates at most {MAX_TREE_CONFIGURATIONS} configurations, got {0}")]
    TooManyConfigurations(usize),
    #[error("assessment references {0}, which is not in the model")]
    UnknownNode(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    TextTree,
    Dot,
    MarkdownTable,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    All,
    Ids(Vec<String>),
}

impl Selection {
    fn includes(&self, id: &str) -> bool {
        match self {
            Selection::All => true,
            Selection::Ids(ids) => ids.iter().any(|i| i == id),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportRequest<'a> {
    pub model: &'a ThreatModel,
    pub scenarios: Selection,
    pub sources: Selection,
    pub configurations: Vec<String>,
    pub format: ReportFormat,
}

impl ReportRequest<'_> {
    /// Assessments for every selected, assessable (scenario, source) pair
    /// under each configuration, grouped by pair.
    pub fn assessments(&self) -> Result<Vec<Vec<Assessment>>, ReportError> {
        if self.configurations.is_empty() {
            return Err(ReportError::Empty);
        }
        if let Selection::Ids(ids) = &self.scenarios {
            if let Some(id) = ids.iter().find(|id| self.model.scenario(id).is_none()) {
                return Err(EngineError::UnknownScenario(id.clone()).into());
            }
        }
        if let Selection::Ids(ids) = &self.sources {
            if let Some(id) = ids.iter().find(|id| self.model.source(id).is_none()) {
                return Err(EngineError::UnknownSource(id.clone()).into());
            }
        }
        let configs =
            self.configurations.iter().map(|c| resolve_configuration(self.model, c)).collect::<Result<Vec<_>, _>>()?;
        let mut groups = Vec::new();
        for (scenario, source) in assessable_pairs(self.model) {
            if !self.scenarios.includes(&scenario) || !self.sources.includes(&source) {
                continue;
            }
            let group =
                configs.iter().map(|c| assess(self.model, &scenario, &source, c)).collect::<Result<Vec<_>, _>>()?;
            groups.push(group);
        }
        Ok(groups)
    }

    pub fn render(&self) -> Result<String, ReportError> {
        let groups = self.assessments()?;
        match self.format {
            ReportFormat::TextTree => {
                let mut out = Vec::new();
                for group in &groups {
                    for chunk in group.chunks(MAX_TREE_CONFIGURATIONS) {
                        out.push(render_tree(self.model, chunk)?);
                    }
                }
                Ok(out.join("\n"))
            }
            ReportFormat::Dot => {
                let mut out = String::new();
                for a in groups.iter().flatten() {
                    out.push_str(&export_dot(self.model, a)?);
                }
                Ok(out)
            }
            ReportFormat::MarkdownTable | ReportFormat::Csv => {
                let flat: Vec<Assessment> = groups.into_iter().flatten().collect();
                let format = if self.format == ReportFormat::Csv { TableFormat::Csv } else { TableFormat::Markdown };
                Ok(render_risk_table(self.model, &flat, format))
            }
        }
    }
}

fn abbrev_list(levels: impl IntoIterator<Item = Level>) -> String {
    levels.into_iter().map(Level::abbrev).collect::<Vec<_>>().join(", ")
}

fn vector_chain(v: &VectorScore) -> String {
    format!(
        "{} ({}: {} → res: {} → {})",
        v.combined.abbrev(),
        v.basis.label(),
        v.fit_or_inherent.abbrev(),
        v.residual.abbrev(),
        v.combined.abbrev()
    )
}

/// Indented tree of one scenario for one threat source, annotated under
/// one or two configurations in the order given.
pub fn render_tree(model: &ThreatModel, assessments: &[Assessment]) -> Result<String, ReportError> {
    let first = assessments.first().ok_or(ReportError::Empty)?;
    if assessments.iter().any(|a| a.scenario != first.scenario || a.source != first.source) {
        return Err(ReportError::MixedScenario);
    }
    if assessments.len() > MAX_TREE_CONFIGURATIONS {
        return Err(ReportError::TooManyConfigurations(assessments.len()));
    }
    let scenario = model.scenario(&first.scenario).ok_or_else(|| ReportError::UnknownNode(first.scenario.clone()))?;
    let source = model.source(&first.source).ok_or_else(|| ReportError::UnknownNode(first.source.clone()))?;

    let mut out = String::new();
    let _ = writeln!(out, "{}: {}", scenario.id, scenario.description);
    let _ = writeln!(out, "  threat source: {} [{}] | impact: {}", source.name, source.id, first.impact);
    for a in assessments {
        let _ = writeln!(
            out,
            "  {}: {} = min({})",
            a.configuration_name,
            a.scenario_likelihood.abbrev(),
            abbrev_list(a.objective_likelihoods.iter().map(|o| o.likelihood))
        );
    }

    for objective in &first.objective_likelihoods {
        let node = model
            .objective(&objective.objective)
            .ok_or_else(|| ReportError::UnknownNode(objective.objective.clone()))?;
        let _ = writeln!(out, "  Obj: {} [{}]", node.name, node.id);
        for a in assessments {
            let likelihood = a.objective(&node.id).ok_or_else(|| ReportError::UnknownNode(node.id.clone()))?;
            let _ = writeln!(
                out,
                "    {}: {} = max({})",
                a.configuration_name,
                likelihood.abbrev(),
                abbrev_list(a.vectors_of(&node.id).map(|v| v.combined))
            );
        }
        for technique in model.techniques_of(&node.id) {
            let _ = writeln!(out, "    Tech: {} [{}]", technique.name, technique.id);
            let mut any = false;
            for vector in model.vectors_of(&technique.id) {
                any = true;
                let _ = writeln!(out, "      Vec: {} [{}]", vector.name, vector.id);
                for a in assessments {
                    let score = a.vector(&vector.id).ok_or_else(|| ReportError::UnknownNode(vector.id.clone()))?;
                    let _ = writeln!(out, "        {}: {}", a.configuration_name, vector_chain(score));
                }
            }
            assert!(any, "technique {} has no vectors; validation should have rejected the model", technique.id);
        }
    }
    for a in assessments {
        let _ = writeln!(out, "  Risk ({}): {}", a.configuration_name, a.risk);
    }
    Ok(out)
}

/// Fill colour of the scenario node, by risk label.
pub fn risk_color(label: RiskLabel) -> &'static str {
    match label {
        RiskLabel::VeryHigh => "red",
        RiskLabel::High => "orange",
        RiskLabel::Moderate => "yellow",
        RiskLabel::Low => "palegreen",
        RiskLabel::VeryLow => "lightblue",
    }
}

fn dot_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One assessed tree as a Graphviz digraph. Node ids are model ids.
pub fn export_dot(model: &ThreatModel, a: &Assessment) -> Result<String, ReportError> {
    let scenario = model.scenario(&a.scenario).ok_or_else(|| ReportError::UnknownNode(a.scenario.clone()))?;
    let source_name = model.source(&a.source).map_or(a.source.as_str(), |s| s.name.as_str());

    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", dot_str(&format!("{}/{}/{}", a.scenario, a.source, a.configuration)));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ =
        writeln!(out, "  label={};", dot_str(&format!("{} | {} | {}", scenario.id, source_name, a.configuration_name)));
    let _ = writeln!(out, "  node [shape=box, style=\"rounded,filled\", fillcolor=white];");
    let _ = writeln!(
        out,
        "  {} [label={}, fillcolor={}];",
        dot_str(&scenario.id),
        dot_str(&format!("{}: {}\n{} | risk {}", scenario.id, scenario.description, a.scenario_likelihood, a.risk)),
        risk_color(a.risk.label())
    );

    let mut edges = Vec::new();
    for objective in &a.objective_likelihoods {
        let node = model
            .objective(&objective.objective)
            .ok_or_else(|| ReportError::UnknownNode(objective.objective.clone()))?;
        let _ = writeln!(
            out,
            "  {} [label={}];",
            dot_str(&node.id),
            dot_str(&format!("{}\n{}", node.name, objective.likelihood))
        );
        edges.push((scenario.id.as_str(), node.id.as_str()));
        for technique in model.techniques_of(&node.id) {
            let _ = writeln!(
                out,
                "  {} [label={}, shape=ellipse, style=solid];",
                dot_str(&technique.id),
                dot_str(&technique.name)
            );
            edges.push((node.id.as_str(), technique.id.as_str()));
            for vector in model.vectors_of(&technique.id) {
                let score = a.vector(&vector.id).ok_or_else(|| ReportError::UnknownNode(vector.id.clone()))?;
                let _ = writeln!(
                    out,
                    "  {} [label={}];",
                    dot_str(&vector.id),
                    dot_str(&format!("{}\n{}", vector.name, vector_chain(score)))
                );
                edges.push((technique.id.as_str(), vector.id.as_str()));
            }
        }
    }
    for (from, to) in edges {
        let _ = writeln!(out, "  {} -> {};", dot_str(from), dot_str(to));
    }
    out.push_str("}\n");
    Ok(out)
}

pub const TABLE_HEADER: [&str; 6] = ["Scenario", "Threat Source", "Configuration", "Likelihood", "Impact", "Risk"];

fn table_row(model: &ThreatModel, a: &Assessment) -> [String; 6] {
    let source = model.source(&a.source).map_or_else(|| a.source.clone(), |s| s.name.clone());
    [
        a.scenario.clone(),
        source,
        a.configuration_name.clone(),
        a.scenario_likelihood.to_string(),
        a.impact.to_string(),
        a.risk.to_string(),
    ]
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|")
}

/// One row per assessment, in input order.
pub fn render_risk_table(model: &ThreatModel, assessments: &[Assessment], format: TableFormat) -> String {
    match format {
        TableFormat::Markdown => {
            let mut out = String::new();
            let _ = writeln!(out, "| {} |", TABLE_HEADER.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(TABLE_HEADER.len()));
            for a in assessments {
                let row = table_row(model, a);
                let cells: Vec<String> = row.iter().map(|c| md_cell(c)).collect();
                let _ = writeln!(out, "| {} |", cells.join(" | "));
            }
            out
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            // Writing to memory cannot fail.
            w.write_record(TABLE_HEADER).expect("in-memory csv");
            for a in assessments {
                w.write_record(table_row(model, a)).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 input yields utf-8 csv")
        }
    }
}
