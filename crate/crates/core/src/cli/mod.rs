//! Command-line front end. The `feyn` binary is a thin wrapper around [`run`].

mod verify;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::expansion_engine::{
    exact_normalized_moment, exact_partition_function, Engine, EngineError, ExpansionRequest,
    SeriesResult, VolumeSpec,
};
use crate::feynman_graphs::{enumerate_graphs, FeynmanGraph, GraphError};
use crate::moment_oracles::{Cumulants, Measure, OracleError, SiteIndex};
use crate::partitions::{Capacity, PartitionError, DEFAULT_CAPACITY};
use crate::powerseries::FormalSeries;
use crate::scalar::{self, Scalar};
use crate::wick_ordering::Wick;

pub use verify::{run_suite, Suite, SuiteOutcome, VerifyOptions};

/// Two-site discrete measure used when `verify` gets no `--measure`.
pub const BUNDLED_MEASURE: &str = include_str!("../../data/two_site.json");

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

const AFTER_HELP: &str = "\
Exit codes:
  0  success
  1  verification failure (the first counterexample is printed)
  2  configuration error: unreadable file, schema violation, invalid measure
  3  capacity or oracle capability exceeded

Measure files (JSON, all scalars are strings \"p/q\" or integers):
  {\"type\":\"discrete\",\"sites\":K,\"configs\":[{\"weight\":\"1/2\",\"values\":[\"1\",...]},...]}
  {\"type\":\"gaussian\",\"covariance\":[[\"1\",\"0\"],[\"0\",\"1\"]]}
  {\"type\":\"iid_cumulant\",\"sites\":K,\"cumulants\":[\"0\",\"1\",\"6\",...]}

Series output:
  {\"order\":N,\"coefficients\":[\"1\",\"-3/2\",...],\"graph_counts\":[...],
   \"filtered\":\"none|wick|connected|wick+connected\",\"kind\":...,\"request\":{...}}
  --lambda adds \"float_evaluations\":[{\"lambda\":..,\"value\":..,\"series_value\":..,
  \"precision\":\"binary64\"}]; a \"generated_at\" timestamp is added unless --no-timestamp.

FEYN_CAPACITY overrides the largest leg set that will be enumerated (default 14).";

#[derive(Debug, Parser)]
#[command(
    name = "feyn",
    version,
    about = "Generalized Feynman graph expansions over finite measures, in exact arithmetic",
    after_help = AFTER_HELP
)]
struct Cli {
    /// Largest leg set (n + p*m) that will be enumerated.
    #[arg(long, env = "FEYN_CAPACITY", default_value_t = DEFAULT_CAPACITY, global = true)]
    capacity: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count or list the graphs with n outer and m inner vertices.
    Enumerate(EnumerateArgs),
    /// Write one graph as DOT.
    Render(RenderArgs),
    /// Compute a perturbation series.
    Series(SeriesArgs),
    /// Run the identity suites against a measure.
    Verify(VerifyArgs),
    /// Table of expectations of products of two Wick monomials.
    WickReport(WickReportArgs),
}

#[derive(Debug, Args)]
struct GraphShape {
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Legs per inner vertex.
    #[arg(long, default_value_t = 4)]
    p: usize,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[command(flatten)]
    shape: GraphShape,
    /// Keep connected graphs only.
    #[arg(long)]
    connected_only: bool,
    /// Keep graphs without self-contractions only.
    #[arg(long)]
    wick_only: bool,
    /// Print only the number of graphs.
    #[arg(long)]
    count_only: bool,
    /// Print the canonical form of every graph after the count.
    #[arg(long, conflicts_with = "count_only")]
    list: bool,
    /// Write g_{n}_{m}_{index}.dot for every graph into this directory.
    #[arg(long)]
    dot_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RenderArgs {
    #[command(flatten)]
    shape: GraphShape,
    /// Canonical graph text, e.g. "x1,v1.1|v1.2".
    #[arg(long, conflicts_with = "index", required_unless_present = "index")]
    graph: Option<String>,
    /// Position of the graph in enumeration order (0-based).
    #[arg(long)]
    index: Option<usize>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// External point sites x_1..x_n (comma separated).
    #[arg(long, value_delimiter = ',')]
    external: Vec<SiteIndex>,
    /// Integration sites (default: every site of the measure).
    #[arg(long, value_delimiter = ',')]
    volume_sites: Option<Vec<SiteIndex>>,
    /// Weight per integration site (default: all 1).
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<String>>,
    /// Worker threads for graph evaluation; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    /// Measure file (JSON).
    #[arg(long)]
    measure: PathBuf,
    #[command(flatten)]
    common: MeasureArgs,
    /// Interaction degree: V = sum_y w(y) phi(y)^p.
    #[arg(long, default_value_t = 4)]
    p: usize,
    /// Highest power of the coupling.
    #[arg(long = "N", visible_alias = "order", default_value_t = 2)]
    order: usize,
    /// Wick-ordered interaction: drop self-contracted graphs.
    #[arg(long)]
    wick: bool,
    /// Keep connected graphs only.
    #[arg(long)]
    connected: bool,
    /// Series of ln Xi (connected vacuum graphs). Requires no external points.
    #[arg(long, conflicts_with_all = ["normalized", "connected"])]
    free_energy: bool,
    /// Moments normalized by the partition function.
    #[arg(long, conflicts_with = "connected")]
    normalized: bool,
    /// Also evaluate the exact value and the partial sum at these couplings
    /// (discrete measures only).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    lambda: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Leave out the generated_at field.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Measure file (default: bundled two-site discrete measure).
    #[arg(long)]
    measure: Option<PathBuf>,
    #[command(flatten)]
    common: MeasureArgs,
    /// Run one suite only.
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Restrict suites to this interaction degree.
    #[arg(long)]
    p: Option<usize>,
    /// Restrict suites to this order.
    #[arg(long = "N", visible_alias = "order")]
    order: Option<usize>,
}

#[derive(Debug, Args)]
struct WickReportArgs {
    #[arg(long)]
    measure: PathBuf,
    #[arg(long, default_value_t = 3)]
    max_degree: usize,
    /// Sites the monomials are built from.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    sites: Vec<SiteIndex>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Capacity(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Capacity(_) => EXIT_CAPACITY,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        if e.is_capacity() {
            CliError::Capacity(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        EngineError::from(e).into()
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        EngineError::from(e).into()
    }
}

impl From<PartitionError> for CliError {
    fn from(e: PartitionError) -> Self {
        EngineError::from(e).into()
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let capacity = Capacity(cli.capacity);
    let result = match cli.command {
        Command::Enumerate(a) => cmd_enumerate(&a, capacity, out),
        Command::Render(a) => cmd_render(&a, capacity, out),
        Command::Series(a) => cmd_series(&a, capacity, out),
        Command::Verify(a) => cmd_verify(&a, capacity, out),
        Command::WickReport(a) => cmd_wick_report(&a, capacity, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Config(e.to_string())),
    }
}

fn cmd_enumerate(
    a: &EnumerateArgs,
    capacity: Capacity,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let GraphShape { n, m, p } = a.shape;
    let graphs = enumerate_graphs(n, m, p, capacity)?.filter(|g| {
        (!a.connected_only || g.is_connected()) && (!a.wick_only || !g.has_self_contraction())
    });
    if let Some(dir) = &a.dot_dir {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    let mut count = 0usize;
    let mut listing = String::new();
    for g in graphs {
        if a.list {
            listing.push_str(&g.to_string());
            listing.push('\n');
        }
        if let Some(dir) = &a.dot_dir {
            let path = dir.join(format!("g_{n}_{m}_{count}.dot"));
            fs::write(&path, g.to_dot()).map_err(|e| io_error(&path, e))?;
        }
        count += 1;
    }
    emit(&format!("{count}\n{listing}"), None, out)
}

fn cmd_render(a: &RenderArgs, capacity: Capacity, out: &mut dyn Write) -> Result<(), CliError> {
    let GraphShape { n, m, p } = a.shape;
    let graph = match (&a.graph, a.index) {
        (Some(text), _) => FeynmanGraph::parse(text, n, m, p)?,
        (None, Some(i)) => enumerate_graphs(n, m, p, capacity)?
            .nth(i)
            .ok_or_else(|| CliError::Config(format!("index {i} is past the last graph")))?,
        (None, None) => return Err(CliError::Config("pass --graph or --index".into())),
    };
    emit(&graph.to_dot(), a.output.as_deref(), out)
}

fn load_measure(path: &Path) -> Result<Measure, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Measure::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Resolves the volume and external sites against the measure. Everything
/// here is a configuration error.
fn build_volume(common: &MeasureArgs, measure: &Measure) -> Result<VolumeSpec, CliError> {
    let k = measure.oracle().num_sites();
    let sites = common
        .volume_sites
        .clone()
        .unwrap_or_else(|| (0..k).collect());
    let weights = match &common.weights {
        Some(ws) => ws
            .iter()
            .map(|w| scalar::parse(w).map_err(|e| CliError::Config(e.to_string())))
            .collect::<Result<Vec<Scalar>, _>>()?,
        None => vec![scalar::from_i64(1); sites.len()],
    };
    if let Some(&s) = sites.iter().chain(&common.external).find(|&&s| s >= k) {
        return Err(CliError::Config(format!(
            "site {s} out of range for a measure on {k} sites"
        )));
    }
    VolumeSpec::new(sites, weights).map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Debug, Serialize)]
struct FloatEvaluation {
    lambda: f64,
    value: f64,
    series_value: f64,
    precision: &'static str,
}

#[derive(Debug, Serialize)]
struct SeriesReport<'a> {
    order: usize,
    coefficients: &'a FormalSeries,
    graph_counts: &'a [u64],
    filtered: &'a str,
    kind: &'static str,
    request: &'a ExpansionRequest,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    float_evaluations: Vec<FloatEvaluation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<u64>,
}

fn cmd_series(a: &SeriesArgs, capacity: Capacity, out: &mut dyn Write) -> Result<(), CliError> {
    let measure = load_measure(&a.measure)?;
    let volume = build_volume(&a.common, &measure)?;
    let mut req = ExpansionRequest::new(a.common.external.clone(), a.p, a.order, volume);
    req.wick_ordered = a.wick;
    req.connected_only = a.connected;
    if a.p == 0 {
        return Err(CliError::Config("--p must be at least 1".into()));
    }
    if a.free_energy && req.n() != 0 {
        return Err(CliError::Config(
            "--free-energy takes no --external points".into(),
        ));
    }
    if a.normalized && req.n() == 0 {
        return Err(CliError::Config(
            "--normalized needs --external points".into(),
        ));
    }
    if a.common.jobs == 0 {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    let discrete = measure.as_discrete();
    if !a.lambda.is_empty() {
        if discrete.is_none() {
            return Err(CliError::Config("--lambda needs a discrete measure".into()));
        }
        if a.wick || a.connected {
            return Err(CliError::Config(
                "--lambda has no exact value to compare with --wick or --connected".into(),
            ));
        }
    }
    capacity.check(req.required_order())?;
    let oracle = measure.oracle();
    if req.required_order() > oracle.max_order() {
        return Err(OracleError::Capability {
            requested: req.required_order(),
            max: oracle.max_order(),
        }
        .into());
    }

    let engine = Engine::new(oracle)
        .with_capacity(capacity)
        .with_jobs(a.common.jobs)?;
    let (result, kind): (SeriesResult, _) = if a.free_energy {
        (engine.free_energy_series(&req)?, "free_energy")
    } else if a.normalized {
        (engine.normalized_moment_series(&req)?, "normalized_moment")
    } else {
        (engine.perturbation_series(&req)?, "perturbation")
    };

    let float_evaluations = match discrete {
        Some(d) => a
            .lambda
            .iter()
            .map(|&lambda| {
                let z = exact_partition_function(d, &req, lambda);
                let value = match kind {
                    "free_energy" => z.ln(),
                    "normalized_moment" => exact_normalized_moment(d, &req, lambda),
                    _ if req.n() == 0 => z,
                    _ => exact_normalized_moment(d, &req, lambda) * z,
                };
                FloatEvaluation {
                    lambda,
                    value,
                    series_value: result.series.eval_f64(lambda),
                    precision: "binary64",
                }
            })
            .collect(),
        None => Vec::new(),
    };

    let text = match a.format {
        Format::Json => {
            let generated_at = (!a.no_timestamp).then(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
            let report = SeriesReport {
                order: result.order,
                coefficients: &result.series,
                graph_counts: &result.graph_counts,
                filtered: &result.filtered,
                kind,
                request: &result.request,
                float_evaluations,
                generated_at,
            };
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Config(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("order,coefficient,graph_count\n");
            for (k, (c, g)) in result
                .series
                .to_strings()
                .iter()
                .zip(&result.graph_counts)
                .enumerate()
            {
                s.push_str(&format!("{k},{c},{g}\n"));
            }
            s
        }
    };
    emit(&text, a.output.as_deref(), out)
}

fn cmd_verify(a: &VerifyArgs, capacity: Capacity, out: &mut dyn Write) -> Result<(), CliError> {
    let measure = match &a.measure {
        Some(path) => load_measure(path)?,
        None => Measure::from_json(BUNDLED_MEASURE).map_err(|e| CliError::Config(e.to_string()))?,
    };
    let volume = build_volume(&a.common, &measure)?;
    let opts = VerifyOptions {
        p: a.p,
        order: a.order,
        jobs: a.common.jobs.max(1),
        capacity,
        volume,
    };
    let suites = match a.suite {
        Some(s) => vec![s],
        None => Suite::all().to_vec(),
    };
    let mut log = String::new();
    for suite in &suites {
        let outcome = run_suite(*suite, &measure, &opts)?;
        for line in &outcome.details {
            log.push_str(&format!("  {line}\n"));
        }
        match &outcome.failure {
            Some(counterexample) => {
                log.push_str(&format!("{}: FAIL\n", suite.name()));
                emit(&log, None, out)?;
                return Err(CliError::Verification(format!(
                    "suite {} failed: {counterexample}",
                    suite.name()
                )));
            }
            None => match &outcome.skipped {
                Some(reason) => log.push_str(&format!("{}: SKIP ({reason})\n", suite.name())),
                None => log.push_str(&format!(
                    "{}: PASS ({} checks)\n",
                    suite.name(),
                    outcome.checks
                )),
            },
        }
    }
    log.push_str(&format!("PASS ({} suites)\n", suites.len()));
    emit(&log, None, out)
}

fn cmd_wick_report(
    a: &WickReportArgs,
    capacity: Capacity,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let measure = load_measure(&a.measure)?;
    let k = measure.oracle().num_sites();
    if let Some(&s) = a.sites.iter().find(|&&s| s >= k) {
        return Err(CliError::Config(format!(
            "site {s} out of range for a measure on {k} sites"
        )));
    }
    if a.max_degree == 0 {
        return Err(CliError::Config("--max-degree must be at least 1".into()));
    }
    let cumulants = Cumulants::new(measure.oracle());
    let wick = Wick::with_capacity(&cumulants, capacity);
    let report = wick
        .orthogonality_report(&a.sites, a.max_degree)
        .map_err(EngineError::from)?;
    let mut text =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    emit(&text, a.output.as_deref(), out)
}
