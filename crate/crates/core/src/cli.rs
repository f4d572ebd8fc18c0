//! The `eolcycle` command-line workflow: validate, query, decide, explain.
//!
//! Exit codes are a stable contract: 0 success, 1 input error (missing
//! files, parse failures, unknown products), 2 validation errors, 3 decision
//! gap (product at end of life but no route derived).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::eol::{
    decide, default_ruleset_with_window, explain_report, DecideError, EngineConfig,
};
use crate::graph::Graph;
use crate::query::{execute, parse_query, serialize_results, OutputFormat};
use crate::rules::{parse_rules, Limits, Rule};
use crate::term::Iri;
use crate::turtle;
use crate::validate::{validate, Mode};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT_ERROR: u8 = 1;
pub const EXIT_VALIDATION_FAILED: u8 = 2;
pub const EXIT_DECISION_GAP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "eolcycle",
    version,
    about = "Provenance knowledge graph and end-of-life decision support for construction products"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Lifecycle data files (.ttl), merged into one graph in order.
    #[arg(required = true, value_name = "DATA")]
    data: Vec<PathBuf>,

    /// Output format.
    #[arg(long, global = false, default_value = "pretty", env = "EOLCYCLE_FORMAT")]
    format: OutputFormatArg,

    /// Configuration file (thresholds, at-EoL window, reconciliation,
    /// ruleset path). Flags override file values.
    #[arg(long, value_name = "PATH", env = "EOLCYCLE_CONFIG")]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum OutputFormatArg {
    Tsv,
    Json,
    Pretty,
}

impl From<OutputFormatArg> for OutputFormat {
    fn from(arg: OutputFormatArg) -> Self {
        match arg {
            OutputFormatArg::Tsv => OutputFormat::Tsv,
            OutputFormatArg::Json => OutputFormat::Json,
            OutputFormatArg::Pretty => OutputFormat::Pretty,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse data files and check them against the schema constraints.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Treat the existential warnings as errors.
        #[arg(long, env = "EOLCYCLE_STRICT")]
        strict: bool,
    },
    /// Evaluate a query against the (optionally inferred) graph.
    Query {
        #[command(flatten)]
        common: CommonArgs,
        /// Query file (.rq).
        #[arg(long, value_name = "PATH", conflicts_with = "query")]
        file: Option<PathBuf>,
        /// Inline query text.
        #[arg(long, value_name = "TEXT")]
        query: Option<String>,
        /// Run rule inference before evaluating the query.
        #[arg(long)]
        infer: bool,
        /// Ruleset file overriding the bundled default.
        #[arg(long, value_name = "PATH", env = "EOLCYCLE_RULESET")]
        ruleset: Option<PathBuf>,
    },
    /// Run inference and report the end-of-life decision for a product.
    Decide {
        #[command(flatten)]
        common: CommonArgs,
        /// Product IRI (prefixed, e.g. ccpo:iwp1).
        #[arg(value_name = "PRODUCT")]
        product: String,
        #[arg(long, value_name = "PATH", env = "EOLCYCLE_RULESET")]
        ruleset: Option<PathBuf>,
    },
    /// Narrate the derivation that led to a product's decision.
    Explain {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(value_name = "PRODUCT")]
        product: String,
        #[arg(long, value_name = "PATH", env = "EOLCYCLE_RULESET")]
        ruleset: Option<PathBuf>,
    },
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are success paths; anything else is an input
            // error under the exit-code contract (clap's default would be 2,
            // which this tool reserves for validation failures).
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT_ERROR,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute_command(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}

fn execute_command(command: Command) -> Result<u8, String> {
    match command {
        Command::Validate { common, strict } => {
            let graph = load_graph(&common.data)?;
            let mode = if strict { Mode::Strict } else { Mode::Advisory };
            let report = validate(&graph, mode);
            match common.format {
                OutputFormatArg::Json => println!("{}", report.to_json()),
                _ => {
                    for issue in &report.errors {
                        println!("error[{}] {}: {}", issue.code, issue.entity, issue.message);
                    }
                    for issue in &report.warnings {
                        println!(
                            "warning[{}] {}: {}",
                            issue.code, issue.entity, issue.message
                        );
                    }
                    println!(
                        "checked {} constraints: {} error(s), {} warning(s)",
                        report.checked,
                        report.errors.len(),
                        report.warnings.len()
                    );
                }
            }
            Ok(if report.is_consistent() {
                EXIT_OK
            } else {
                EXIT_VALIDATION_FAILED
            })
        }
        Command::Query {
            common,
            file,
            query,
            infer,
            ruleset,
        } => {
            let mut graph = load_graph(&common.data)?;
            let text = match (file, query) {
                (Some(path), None) => std::fs::read_to_string(&path)
                    .map_err(|e| format!("cannot read query {}: {e}", path.display()))?,
                (None, Some(text)) => text,
                (None, None) => return Err("expected --file or --query".into()),
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            if infer {
                let config = load_config(common.config.as_deref())?;
                let rules = load_ruleset(ruleset.as_deref(), &config)?;
                crate::rules::forward_chain(&mut graph, &rules, &Limits::default())
                    .map_err(|e| e.to_string())?;
            }
            let ast = parse_query(&text).map_err(|e| e.to_string())?;
            let table = execute(&ast, &graph);
            print!(
                "{}",
                serialize_results(&table, common.format.into(), graph.prefixes())
            );
            Ok(EXIT_OK)
        }
        Command::Decide {
            common,
            product,
            ruleset,
        } => {
            if common.format == OutputFormatArg::Tsv {
                return Err("decide reports are json or pretty, not tsv".into());
            }
            let mut graph = load_graph(&common.data)?;
            let config = load_config(common.config.as_deref())?;
            let rules = load_ruleset(ruleset.as_deref(), &config)?;
            let product = resolve_product(&graph, &product)?;
            let report = decide(&mut graph, &product, &rules, &Limits::default())
                .map_err(decide_error_message)?;
            match common.format {
                OutputFormatArg::Json => println!("{}", report.to_json(&graph)),
                _ => print!("{}", report.to_pretty(&graph)),
            }
            Ok(if report.at_eol && report.final_route.is_none() {
                EXIT_DECISION_GAP
            } else {
                EXIT_OK
            })
        }
        Command::Explain {
            common,
            product,
            ruleset,
        } => {
            let mut graph = load_graph(&common.data)?;
            let config = load_config(common.config.as_deref())?;
            let rules = load_ruleset(ruleset.as_deref(), &config)?;
            let product = resolve_product(&graph, &product)?;
            let report = decide(&mut graph, &product, &rules, &Limits::default())
                .map_err(decide_error_message)?;
            print!("{}", explain_report(&report, &graph));
            Ok(EXIT_OK)
        }
    }
}

fn decide_error_message(err: DecideError) -> String {
    err.to_string()
}

fn load_graph(paths: &[PathBuf]) -> Result<Graph, String> {
    let mut graph = Graph::with_ccpo_schema();
    for path in paths {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        turtle::load_str(&mut graph, &text)
            .map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(graph)
}

fn load_config(path: Option<&Path>) -> Result<EngineConfig, String> {
    match path {
        Some(path) => EngineConfig::from_path(path).map_err(|e| e.to_string()),
        None => Ok(EngineConfig::default()),
    }
}

/// Flag > config file > bundled default ruleset.
fn load_ruleset(flag: Option<&Path>, config: &EngineConfig) -> Result<Vec<Rule>, String> {
    let path = flag.or(config.decision.ruleset.as_deref());
    match path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read ruleset {}: {e}", path.display()))?;
            parse_rules(&text).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => Ok(default_ruleset_with_window(
            config.decision.reconciliation,
            config.decision.at_eol_window,
        )),
    }
}

/// Accept `prefix:local` (resolved against the graph's registered prefixes)
/// or a full `<iri>` / bare IRI.
fn resolve_product(graph: &Graph, text: &str) -> Result<Iri, String> {
    if let Some(stripped) = text.strip_prefix('<') {
        return Ok(Iri::new(stripped.trim_end_matches('>')));
    }
    if let Some((prefix, local)) = text.split_once(':') {
        if let Some(iri) = graph.prefixes().expand(prefix, local) {
            return Ok(iri);
        }
        if text.contains("://") {
            return Ok(Iri::new(text));
        }
        return Err(format!("unknown prefix '{prefix}' in product id '{text}'"));
    }
    Err(format!(
        "product id '{text}' is neither a prefixed name nor an IRI"
    ))
}
