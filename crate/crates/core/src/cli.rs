//! `wsreg` command driver and output rendering.
//!
//! Exit codes: 0 on success (or no changes for `diff`), 1 when `diff` finds
//! changes, 2 on any input or parse error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rust_decimal::Decimal;
use serde::Serialize;
use thiserror::Error;

use crate::bva::{default_epsilon, generate_suite, BvaConfig, NominalStrategy};
use crate::compare::compare_trees;
use crate::error::Error;
use crate::model::{ChangeKind, ChangeRecord, ClassificationResult, SchemaTree, TestSuite};
use crate::par::*;
use crate::parser::{build_tree, extract_constraints, load_wsdl, WsdlDocument};
use crate::select::{classify_change_impact, select, ChangeImpact};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHANGES: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("cannot parse suite {path}: {message}")]
    SuiteFormat { path: String, message: String },
    #[error("element `{element}` not found in {source_uri}")]
    ElementNotFound { element: String, source_uri: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Pipeline(#[from] Error),
}

/// Everything a command needs, independent of how it was invoked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub baseline_path: PathBuf,
    pub delta_path: Option<PathBuf>,
    pub element_filter: Option<String>,
    pub suite_path: Option<PathBuf>,
    pub nominal_overrides: BTreeMap<String, Decimal>,
    pub output_format: OutputFormat,
    pub float_epsilon: Decimal,
}

impl RunConfig {
    pub fn new(baseline_path: impl Into<PathBuf>) -> Self {
        Self {
            baseline_path: baseline_path.into(),
            delta_path: None,
            element_filter: None,
            suite_path: None,
            nominal_overrides: BTreeMap::new(),
            output_format: OutputFormat::Json,
            float_epsilon: default_epsilon(),
        }
    }

    fn bva_config(&self) -> BvaConfig {
        let strategy = if self.nominal_overrides.is_empty() {
            NominalStrategy::FloorMidpoint
        } else {
            NominalStrategy::Explicit {
                values: self.nominal_overrides.clone(),
            }
        };
        BvaConfig {
            strategy,
            float_epsilon: self.float_epsilon,
        }
    }

    fn delta_path(&self) -> Result<&Path, CliError> {
        self.delta_path
            .as_deref()
            .ok_or_else(|| CliError::Usage("a delta WSDL path is required".into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub stdout: String,
    pub exit_code: i32,
}

#[derive(Debug, Parser)]
#[command(
    name = "wsreg",
    version,
    about = "Regression test selection for web services from WSDL type changes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct BvaArgs {
    /// Nominal (interior) value for a field, e.g. `--nominal Month=7`.
    #[arg(long = "nominal", value_name = "FIELD=VALUE", value_parser = parse_nominal)]
    pub nominal: Vec<(String, Decimal)>,

    /// Step used for decimal-typed boundaries.
    #[arg(long, default_value = "0.01")]
    pub epsilon: Decimal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the numbered tree of each top-level element.
    Tree {
        wsdl: PathBuf,
        #[arg(long)]
        element: Option<String>,
    },
    /// Report datatype changes between two WSDL documents.
    Diff {
        old: PathBuf,
        new: PathBuf,
        #[arg(long)]
        element: Option<String>,
    },
    /// Generate the boundary value suite for one element (default: the first).
    Gen {
        wsdl: PathBuf,
        #[arg(long)]
        element: Option<String>,
        #[command(flatten)]
        bva: BvaArgs,
    },
    /// Classify a baseline suite into reusable and obsolete cases.
    Select {
        #[arg(long)]
        baseline: PathBuf,
        #[arg(long)]
        delta: PathBuf,
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        element: Option<String>,
        #[command(flatten)]
        bva: BvaArgs,
    },
}

fn parse_nominal(s: &str) -> Result<(String, Decimal), String> {
    let (field, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected FIELD=VALUE, got `{s}`"))?;
    if field.is_empty() {
        return Err(format!("empty field name in `{s}`"));
    }
    let value = value
        .trim()
        .parse::<Decimal>()
        .map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((field.to_string(), value))
}

/// Parses `args` (including the program name) and runs the command,
/// printing results. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.exit_code
        }
        Err(e) => {
            eprintln!("wsreg: {e}");
            EXIT_ERROR
        }
    }
}

type Handler = fn(&RunConfig) -> Result<CommandOutput, CliError>;

pub fn execute(cli: Cli) -> Result<CommandOutput, CliError> {
    let format = cli.format;
    let (config, command): (RunConfig, Handler) = match cli.command {
        Command::Tree { wsdl, element } => {
            let mut c = RunConfig::new(wsdl);
            c.element_filter = element;
            (c, cmd_tree)
        }
        Command::Diff { old, new, element } => {
            let mut c = RunConfig::new(old);
            c.delta_path = Some(new);
            c.element_filter = element;
            (c, cmd_diff)
        }
        Command::Gen { wsdl, element, bva } => {
            let mut c = RunConfig::new(wsdl);
            c.element_filter = element;
            c.nominal_overrides = bva.nominal.into_iter().collect();
            c.float_epsilon = bva.epsilon;
            (c, cmd_gen)
        }
        Command::Select {
            baseline,
            delta,
            suite,
            element,
            bva,
        } => {
            let mut c = RunConfig::new(baseline);
            c.delta_path = Some(delta);
            c.suite_path = Some(suite);
            c.element_filter = element;
            c.nominal_overrides = bva.nominal.into_iter().collect();
            c.float_epsilon = bva.epsilon;
            (c, cmd_select)
        }
    };
    command(&RunConfig {
        output_format: format,
        ..config
    })
}

fn read_input(path: &Path) -> Result<String, CliError> {
    let io_err = |e: std::io::Error| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    if path == Path::new("-") {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(io_err)?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(io_err)
    }
}

fn load(path: &Path) -> Result<WsdlDocument, CliError> {
    let text = read_input(path)?;
    Ok(load_wsdl(&text, &path.display().to_string())?)
}

/// Builds the trees of `doc`, restricted to `filter` when given.
fn trees(doc: &WsdlDocument, filter: Option<&str>) -> Result<Vec<SchemaTree>, CliError> {
    let decls: Vec<_> = match filter {
        Some(name) => vec![doc.find(name).ok_or_else(|| CliError::ElementNotFound {
            element: name.to_string(),
            source_uri: doc.source_uri.clone(),
        })?],
        None => doc.schemas.iter().collect(),
    };
    let built: Vec<_> = decls.par_iter().map(|d| build_tree(d)).collect();
    built.into_iter().map(|t| t.map_err(CliError::from)).collect()
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn opt(v: &Option<String>) -> &str {
    v.as_deref().unwrap_or("null")
}

pub fn render_tree_text(tree: &SchemaTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", tree.element_name());
    for node in tree.nodes() {
        let _ = writeln!(out, "  {} {:?}", node.ordinal, node.kind);
        for attr in &node.attributes {
            let _ = writeln!(
                out,
                "    {}.{} {} = {}",
                node.ordinal,
                attr.ordinal,
                attr.name,
                opt(&attr.value)
            );
        }
    }
    out
}

pub fn cmd_tree(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let doc = load(&config.baseline_path)?;
    let trees = trees(&doc, config.element_filter.as_deref())?;
    let stdout = match config.output_format {
        OutputFormat::Json => to_json(&trees),
        OutputFormat::Text => trees.iter().map(render_tree_text).collect::<Vec<_>>().join("\n"),
    };
    Ok(CommandOutput {
        stdout,
        exit_code: EXIT_OK,
    })
}

/// One line of a change report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffEntry {
    pub element: String,
    pub path: String,
    pub kind: ChangeKind,
    pub old: Option<String>,
    pub new: Option<String>,
}

impl DiffEntry {
    fn new(element: &str, record: ChangeRecord) -> Self {
        Self {
            element: element.to_string(),
            path: record.path,
            kind: record.kind,
            old: record.old_value,
            new: record.new_value,
        }
    }
}

/// Pairs trees by element name and diffs each pair; elements present on only
/// one side become whole-tree deletions or additions.
pub fn diff_documents(baseline: &[SchemaTree], delta: &[SchemaTree]) -> Vec<DiffEntry> {
    let find = |name: &str| delta.iter().find(|t| t.element_name() == name);
    let per_element: Vec<Vec<DiffEntry>> = baseline
        .par_iter()
        .map(|b| {
            let name = b.element_name();
            match find(name) {
                Some(d) => compare_trees(b, d)
                    .into_iter()
                    .map(|r| DiffEntry::new(name, r))
                    .collect(),
                None => vec![DiffEntry::new(
                    name,
                    ChangeRecord::new("1", ChangeKind::NodeDeleted, Some(name.to_string()), None),
                )],
            }
        })
        .collect();
    let mut out: Vec<DiffEntry> = per_element.into_iter().flatten().collect();
    out.extend(
        delta
            .iter()
            .filter(|d| !baseline.iter().any(|b| b.element_name() == d.element_name()))
            .map(|d| {
                DiffEntry::new(
                    d.element_name(),
                    ChangeRecord::new(
                        "1",
                        ChangeKind::NodeAdded,
                        None,
                        Some(d.element_name().to_string()),
                    ),
                )
            }),
    );
    out
}

pub fn cmd_diff(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let filter = config.element_filter.as_deref();
    let baseline_doc = load(&config.baseline_path)?;
    let delta_doc = load(config.delta_path()?)?;
    // A filtered element may legitimately exist on one side only.
    let side = |doc: &WsdlDocument| match filter {
        Some(name) if doc.find(name).is_none() => Ok(Vec::new()),
        _ => trees(doc, filter),
    };
    let baseline = side(&baseline_doc)?;
    let delta = side(&delta_doc)?;
    if let Some(name) = filter {
        if baseline.is_empty() && delta.is_empty() {
            return Err(CliError::ElementNotFound {
                element: name.to_string(),
                source_uri: baseline_doc.source_uri,
            });
        }
    }

    let entries = diff_documents(&baseline, &delta);
    let stdout = match config.output_format {
        OutputFormat::Json => to_json(&entries),
        OutputFormat::Text => entries
            .iter()
            .map(|e| {
                format!(
                    "{} {} {:?}: {} -> {}\n",
                    e.element,
                    e.path,
                    e.kind,
                    opt(&e.old),
                    opt(&e.new)
                )
            })
            .collect(),
    };
    Ok(CommandOutput {
        stdout,
        exit_code: if entries.is_empty() { EXIT_OK } else { EXIT_CHANGES },
    })
}

fn single_tree(doc: &WsdlDocument, filter: Option<&str>) -> Result<SchemaTree, CliError> {
    let decl = match filter {
        Some(name) => doc.find(name).ok_or_else(|| CliError::ElementNotFound {
            element: name.to_string(),
            source_uri: doc.source_uri.clone(),
        })?,
        None => &doc.schemas[0],
    };
    Ok(build_tree(decl)?)
}

fn render_suite_text(suite: &TestSuite, field_order: &[&str]) -> String {
    let mut out = String::new();
    for case in suite.cases() {
        let values: Vec<String> = field_order
            .iter()
            .filter_map(|f| case.values.get(*f).map(|v| format!("{f}={v}")))
            .collect();
        let _ = writeln!(out, "{} {}", case.id, values.join(" "));
    }
    out
}

pub fn cmd_gen(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let doc = load(&config.baseline_path)?;
    let tree = single_tree(&doc, config.element_filter.as_deref())?;
    let constraints = extract_constraints(&tree)?;
    let suite = generate_suite(&constraints, &config.bva_config(), tree.element_name())?;
    let stdout = match config.output_format {
        OutputFormat::Json => to_json(&suite),
        OutputFormat::Text => render_suite_text(&suite, &tree.field_names()),
    };
    Ok(CommandOutput {
        stdout,
        exit_code: EXIT_OK,
    })
}

/// Serialized result of `select`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectReport {
    #[serde(flatten)]
    pub classification: ClassificationResult,
    pub impact: ChangeImpact,
}

fn render_select_text(report: &SelectReport) -> String {
    let c = &report.classification;
    let mut out = String::new();
    let _ = writeln!(out, "impact: {:?}", report.impact);
    let _ = writeln!(out, "reusable: {}", c.reusable().join(" "));
    let _ = writeln!(out, "obsolete: {}", c.obsolete().join(" "));
    let _ = writeln!(out, "recommended new: {}", c.recommended_new().len());
    for frame in c.recommended_new() {
        let values: Vec<String> = frame.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(out, "  {}", values.join(" "));
    }
    out
}

pub fn cmd_select(config: &RunConfig) -> Result<CommandOutput, CliError> {
    let suite_path = config
        .suite_path
        .as_deref()
        .ok_or_else(|| CliError::Usage("a suite path is required".into()))?;
    let suite_text = read_input(suite_path)?;
    let suite: TestSuite = serde_json::from_str(&suite_text).map_err(|e| CliError::SuiteFormat {
        path: suite_path.display().to_string(),
        message: e.to_string(),
    })?;
    if let Some(filter) = &config.element_filter {
        if filter != suite.element_name() {
            return Err(CliError::Usage(format!(
                "suite is for `{}`, not `{filter}`",
                suite.element_name()
            )));
        }
    }
    let element = suite.element_name();

    let baseline_doc = load(&config.baseline_path)?;
    let delta_doc = load(config.delta_path()?)?;
    let baseline = single_tree(&baseline_doc, Some(element))?;

    let report = match delta_doc.find(element) {
        Some(decl) => {
            let delta = build_tree(decl)?;
            let changes = compare_trees(&baseline, &delta);
            let impact = classify_change_impact(&changes, &baseline, &delta);
            let classification = select(&suite, &baseline, &delta, &changes, &config.bva_config())?;
            SelectReport {
                classification,
                impact,
            }
        }
        None => {
            // The whole element is gone from the delta document.
            extract_constraints(&baseline)?;
            let ids: Vec<String> = suite.ids().map(str::to_string).collect();
            SelectReport {
                classification: ClassificationResult::new(suite.ids(), Vec::new(), ids, Vec::new())?,
                impact: ChangeImpact::StructureChange,
            }
        }
    };

    let stdout = match config.output_format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Text => render_select_text(&report),
    };
    Ok(CommandOutput {
        stdout,
        exit_code: EXIT_OK,
    })
}
