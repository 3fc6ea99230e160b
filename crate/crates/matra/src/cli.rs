//! The `matra` command line.

use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use matra_core::engine::{assess, assessable_pairs, resolve_configuration, Assessment};
use matra_core::model::{Configuration, ThreatModel, DEFAULT_CONFIGURATION};
use matra_core::validate::{validate_model, Finding, Severity, ValidationReport};
use matra_core::whatif::{whatif_diff, WhatIfDiff};
use matra_core::EngineError;

use crate::io::{load_model, parse_model, serialize_model, to_json, LoadError};
use crate::report::{export_dot, render_risk_table, render_tree, ReportFormat, ReportRequest, Selection, TableFormat};
use crate::service::{self, parse_control_list, Api};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    ValidationErrors = 1,
    Usage = 2,
    Engine = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "matra", version, about = "Attack-tree risk assessment for agentic AI deployments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct ModelArg {
    /// Threat model document (*.matra.json)
    #[arg(env = "MATRA_MODEL")]
    model: PathBuf,
}

#[derive(Debug, clap::Args)]
struct ConfigArgs {
    /// Named configuration [default: default]
    #[arg(long, conflicts_with = "controls")]
    config: Option<String>,
    /// Ad-hoc comma-separated control set instead of a named configuration
    #[arg(long)]
    controls: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a model and print every finding
    Validate {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, value_enum, default_value_t = ValidateFormat::Human)]
        format: ValidateFormat,
    },
    /// Assess scenarios for threat sources under one configuration
    Assess {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        source: Option<String>,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum, default_value_t = AssessFormat::Json)]
        format: AssessFormat,
    },
    /// Compare one scenario under two configurations
    Whatif {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        source: String,
        #[arg(long)]
        base: String,
        #[arg(long)]
        alt: String,
        #[arg(long, value_enum, default_value_t = WhatIfFormat::Text)]
        format: WhatIfFormat,
    },
    /// Render trees, graphs or risk tables for many assessments
    Report {
        #[command(flatten)]
        model: ModelArg,
        /// Scenario id; repeatable. All scenarios when omitted.
        #[arg(long = "scenario")]
        scenarios: Vec<String>,
        /// Threat source id; repeatable. All in-scope sources when omitted.
        #[arg(long = "source")]
        sources: Vec<String>,
        /// Configuration id; repeatable. `default` when omitted.
        #[arg(long = "config")]
        configs: Vec<String>,
        #[arg(long, value_enum, default_value_t = ReportKind::MarkdownTable)]
        format: ReportKind,
    },
    /// Export a DOT graph of one assessment, or the canonical model document
    Export {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, value_enum, default_value_t = ExportFormat::Dot)]
        format: ExportFormat,
        #[arg(long, required_if_eq("format", "dot"))]
        scenario: Option<String>,
        #[arg(long, required_if_eq("format", "dot"))]
        source: Option<String>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Serve the read-only HTTP API over the model
    Serve {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ValidateFormat {
    Human,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AssessFormat {
    Json,
    Tree,
    Table,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WhatIfFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportKind {
    TextTree,
    Dot,
    MarkdownTable,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    Dot,
    Model,
}

/// A failed command: what to print on stderr and how to exit.
struct Failure {
    status: ExitStatus,
    message: String,
}

impl Failure {
    fn new(status: ExitStatus, message: impl Into<String>) -> Self {
        Failure { status, message: message.into() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let status = match e {
            EngineError::UnknownScenario(_)
            | EngineError::UnknownSource(_)
            | EngineError::UnknownConfiguration(_)
            | EngineError::UnknownControl(_) => ExitStatus::Usage,
            _ => ExitStatus::Engine,
        };
        Failure::new(status, format!("error: {e}"))
    }
}

impl From<crate::report::ReportError> for Failure {
    fn from(e: crate::report::ReportError) -> Self {
        match e {
            crate::report::ReportError::Engine(inner) => inner.into(),
            other => Failure::new(ExitStatus::Engine, format!("error: {other}")),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(ExitStatus::Engine, format!("error: cannot write output: {e}"))
    }
}

type CmdResult = Result<ExitStatus, Failure>;

/// Runs the CLI with explicit output streams.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    ExitStatus::Success
                }
                _ => {
                    let _ = write!(err, "{text}");
                    ExitStatus::Usage
                }
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(status) => status,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.status
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path)
        .map_err(|e| Failure::new(ExitStatus::Usage, format!("error: cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<ThreatModel, Failure> {
    let bytes = read(path)?;
    load_model(&bytes)
        .map_err(|e| Failure::new(ExitStatus::ValidationErrors, format!("error: {}: {e}", path.display())))
}

fn configuration(model: &ThreatModel, args: &ConfigArgs) -> Result<Configuration, Failure> {
    match (&args.config, &args.controls) {
        (_, Some(list)) => {
            let c = Configuration::ad_hoc(parse_control_list(list));
            if let Some(bad) = c.enabled_controls.iter().find(|id| model.control(id).is_none()) {
                return Err(EngineError::UnknownControl(bad.clone()).into());
            }
            Ok(c)
        }
        (Some(id), None) => Ok(resolve_configuration(model, id)?),
        (None, None) => Ok(resolve_configuration(model, DEFAULT_CONFIGURATION)?),
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    match command {
        Command::Validate { model, format } => cmd_validate(&model.model, format, out),
        Command::Assess { model, scenario, source, config, format } => {
            let model = load(&model.model)?;
            cmd_assess(&model, scenario.as_deref(), source.as_deref(), &config, format, out)
        }
        Command::Whatif { model, scenario, source, base, alt, format } => {
            let model = load(&model.model)?;
            cmd_whatif(&model, &scenario, &source, &base, &alt, format, out)
        }
        Command::Report { model, scenarios, sources, configs, format } => {
            let model = load(&model.model)?;
            let selection = |ids: Vec<String>| if ids.is_empty() { Selection::All } else { Selection::Ids(ids) };
            let configurations = if configs.is_empty() { vec![DEFAULT_CONFIGURATION.to_string()] } else { configs };
            let request = ReportRequest {
                model: &model,
                scenarios: selection(scenarios),
                sources: selection(sources),
                configurations,
                format: match format {
                    ReportKind::TextTree => ReportFormat::TextTree,
                    ReportKind::Dot => ReportFormat::Dot,
                    ReportKind::MarkdownTable => ReportFormat::MarkdownTable,
                    ReportKind::Csv => ReportFormat::Csv,
                },
            };
            write!(out, "{}", request.render()?)?;
            Ok(ExitStatus::Success)
        }
        Command::Export { model, format, scenario, source, config } => {
            let model = load(&model.model)?;
            match format {
                ExportFormat::Model => write!(out, "{}", serialize_model(&model))?,
                ExportFormat::Dot => {
                    let c = configuration(&model, &config)?;
                    // clap enforces both ids for dot output.
                    let (scenario, source) = (scenario.unwrap_or_default(), source.unwrap_or_default());
                    let a = assess(&model, &scenario, &source, &c)?;
                    write!(out, "{}", export_dot(&model, &a)?)?;
                }
            }
            Ok(ExitStatus::Success)
        }
        Command::Serve { model, listen } => cmd_serve(&model.model, listen, err),
    }
}

fn cmd_validate(path: &Path, format: ValidateFormat, out: &mut dyn Write) -> CmdResult {
    let bytes = read(path)?;
    let report = match parse_model(&bytes) {
        Ok(model) => validate_model(&model),
        Err(e) => ValidationReport { findings: vec![load_finding(&e)] },
    };
    match format {
        ValidateFormat::Json => write!(out, "{}", to_json(&report))?,
        ValidateFormat::Human => {
            for f in &report.findings {
                writeln!(out, "{f}")?;
            }
            writeln!(
                out,
                "{}: {} error(s), {} warning(s)",
                path.display(),
                report.errors().count(),
                report.warnings().count()
            )?;
        }
    }
    Ok(if report.is_evaluable() { ExitStatus::Success } else { ExitStatus::ValidationErrors })
}

fn load_finding(e: &LoadError) -> Finding {
    let location = match e {
        LoadError::Syntax { line, column, .. }
        | LoadError::UnknownField { line, column, .. }
        | LoadError::Schema { line, column, .. } => format!("line {line}, column {column}"),
        LoadError::UnsupportedVersion(_) => "matra_version".to_string(),
        LoadError::DanglingReference(p) | LoadError::DuplicateId(p) => p.location().to_string(),
    };
    Finding { severity: Severity::Error, code: e.code().to_string(), location, message: e.to_string() }
}

fn cmd_assess(
    model: &ThreatModel,
    scenario: Option<&str>,
    source: Option<&str>,
    config: &ConfigArgs,
    format: AssessFormat,
    out: &mut dyn Write,
) -> CmdResult {
    let config = configuration(model, config)?;
    let assessments: Vec<Assessment> = match (scenario, source) {
        (Some(sc), Some(src)) => vec![assess(model, sc, src, &config)?],
        _ => {
            if let Some(sc) = scenario.filter(|id| model.scenario(id).is_none()) {
                return Err(EngineError::UnknownScenario(sc.to_string()).into());
            }
            if let Some(src) = source.filter(|id| model.source(id).is_none()) {
                return Err(EngineError::UnknownSource(src.to_string()).into());
            }
            assessable_pairs(model)
                .into_iter()
                .filter(|(sc, src)| scenario.is_none_or(|s| s == sc) && source.is_none_or(|s| s == src))
                .map(|(sc, src)| assess(model, &sc, &src, &config))
                .collect::<Result<_, _>>()?
        }
    };
    match format {
        AssessFormat::Json if assessments.len() == 1 => write!(out, "{}", to_json(&assessments[0]))?,
        AssessFormat::Json => write!(out, "{}", to_json(&assessments))?,
        AssessFormat::Tree => {
            let trees = assessments
                .iter()
                .map(|a| render_tree(model, std::slice::from_ref(a)))
                .collect::<Result<Vec<_>, _>>()?;
            write!(out, "{}", trees.join("\n"))?;
        }
        AssessFormat::Table => write!(out, "{}", render_risk_table(model, &assessments, TableFormat::Markdown))?,
        AssessFormat::Csv => write!(out, "{}", render_risk_table(model, &assessments, TableFormat::Csv))?,
    }
    Ok(ExitStatus::Success)
}

fn cmd_whatif(
    model: &ThreatModel,
    scenario: &str,
    source: &str,
    base: &str,
    alt: &str,
    format: WhatIfFormat,
    out: &mut dyn Write,
) -> CmdResult {
    let base = resolve_configuration(model, base)?;
    let alt = resolve_configuration(model, alt)?;
    let diff = whatif_diff(model, scenario, source, &base, &alt)?;
    match format {
        WhatIfFormat::Json => write!(out, "{}", to_json(&diff))?,
        WhatIfFormat::Text => write!(out, "{}", render_whatif(&diff, &base, &alt))?,
    }
    Ok(ExitStatus::Success)
}

/// Human-readable what-if diff.
pub fn render_whatif(diff: &WhatIfDiff, base: &Configuration, alt: &Configuration) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = writeln!(s, "{} / {}: {} → {}", diff.scenario, diff.source, base.name, alt.name);
    if diff.is_empty() {
        let _ = writeln!(s, "no changes");
    } else {
        for v in &diff.vectors {
            if v.changed {
                let _ = writeln!(
                    s,
                    "  vector {}: residual {} → {}, combined {} → {}",
                    v.vector, v.residual.base, v.residual.alt, v.combined.base, v.combined.alt
                );
            } else {
                let _ = writeln!(s, "  vector {}: unchanged ({})", v.vector, v.combined.base);
            }
        }
        for o in &diff.objectives {
            if o.changed {
                let _ = writeln!(s, "  objective {}: {} → {}", o.objective, o.likelihood.base, o.likelihood.alt);
            } else {
                let _ = writeln!(s, "  objective {}: unchanged ({})", o.objective, o.likelihood.base);
            }
        }
        let _ = writeln!(s, "  likelihood: {} → {}", diff.likelihood.base, diff.likelihood.alt);
    }
    let _ = writeln!(s, "risk: {} → {} (delta {:+})", diff.risk.base, diff.risk.alt, diff.score_delta);
    s
}

fn cmd_serve(path: &Path, listen: SocketAddr, err: &mut dyn Write) -> CmdResult {
    let model = load(path)?;
    let report = validate_model(&model);
    if !report.is_evaluable() {
        for f in report.errors() {
            writeln!(err, "{f}")?;
        }
        return Err(Failure::new(
            ExitStatus::ValidationErrors,
            "error: refusing to serve a model with validation errors",
        ));
    }
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::new(ExitStatus::Engine, format!("error: cannot start runtime: {e}")))?;
    runtime.block_on(async {
        let listener =
            service::bind(listen).await.map_err(|e| Failure::new(ExitStatus::Engine, format!("error: {e}")))?;
        let _ = writeln!(err, "serving {} on http://{}", path.display(), listen);
        service::serve(Api::new(model), listener)
            .await
            .map_err(|e| Failure::new(ExitStatus::Engine, format!("error: {e}")))
    })?;
    Ok(ExitStatus::Success)
}
