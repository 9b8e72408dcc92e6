//! Unified command-line entry point.
//!
//! Exit codes: 0 success, 1 integrity error (an invariant was violated),
//! 2 parameter/usage error, 3 stabilization cap exhausted. Machine output
//! goes to stdout as a single JSON document when `--json` is set; a
//! human-readable summary is printed otherwise. `--csv` writes the result
//! table, `--plot` a plot-ready projection of it.

pub mod manifest;
pub mod table;

mod commands;

pub use manifest::{RunManifest, SUBSTREAM_SCHEME};
pub use table::{emit_plot_data, format_float, Cell, ColumnSpec, PlotKind, ResultTable};

use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "ll",
    version,
    about = "Activated random walks, broken-line flow fields, and last-passage percolation",
    propagate_version = true
)]
pub struct Cli {
    /// Root seed; falls back to the LL_SEED environment variable, then to
    /// OS entropy (echoed in the manifest).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for Monte Carlo trials (default: logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Emit the manifest and result table as JSON on stdout.
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    pub json: bool,

    /// Suppress the human-readable summary.
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    pub quiet: bool,

    /// Write the result table as RFC 4180 CSV to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<PathBuf>,

    /// Write plot-ready columns for this command's table to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub plot: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Activated random walk simulations.
    #[command(subcommand)]
    Arw(ArwCommand),
    /// Broken-line flow fields.
    #[command(subcommand)]
    Bl(BlCommand),
    /// Last-passage percolation.
    #[command(subcommand)]
    Lpp(LppCommand),
}

#[derive(Debug, Subcommand)]
pub enum ArwCommand {
    /// Stabilize one sampled configuration and report counters.
    Stabilize(ArwStabilizeArgs),
    /// Monte Carlo estimates of P(R_0 >= r) over a parameter grid.
    Scan(ArwScanArgs),
    /// Sweep-and-trap certification trials.
    Traps(ArwTrapsArgs),
}

#[derive(Debug, Args)]
pub struct ArwStabilizeArgs {
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub lambda: f64,
    /// Right-jump probability.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Box radius: particles start in [-M, M].
    #[arg(long = "M")]
    pub m_box: i64,
    /// Label policy: uniform | round-robin | lowest.
    #[arg(long, default_value = "uniform")]
    pub policy: String,
    #[arg(long, default_value_t = crate::arw::DEFAULT_STEP_CAP)]
    pub step_cap: u64,
}

#[derive(Debug, Args)]
pub struct ArwScanArgs {
    /// Comma-separated density grid.
    #[arg(long = "mu-grid", value_delimiter = ',', required = true)]
    pub mu_grid: Vec<f64>,
    #[arg(long = "lambda-grid", value_delimiter = ',', required = true)]
    pub lambda_grid: Vec<f64>,
    #[arg(long = "M-grid", value_delimiter = ',', required = true)]
    pub m_grid: Vec<i64>,
    #[arg(long = "r-grid", value_delimiter = ',', required = true)]
    pub r_grid: Vec<u64>,
    #[arg(long)]
    pub trials: u64,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = crate::arw::DEFAULT_STEP_CAP)]
    pub step_cap: u64,
}

#[derive(Debug, Args)]
pub struct ArwTrapsArgs {
    #[arg(long)]
    pub mu: f64,
    #[arg(long)]
    pub lambda: f64,
    /// Sweep radius.
    #[arg(long = "K")]
    pub radius: i64,
    #[arg(long)]
    pub trials: u64,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Debug, Subcommand)]
pub enum BlCommand {
    /// Decompose a field document into ordered crossing lines.
    Decompose(BlDecomposeArgs),
    /// Sample a reversible field and write it as JSON.
    Sample(BlSampleArgs),
    /// Intersection statistics along a lattice line.
    Intersections(BlIntersectionsArgs),
}

#[derive(Debug, Args)]
pub struct BlDecomposeArgs {
    /// Input field JSON path.
    #[arg(long)]
    pub input: PathBuf,
    /// Output decomposition JSON path (stdout block otherwise).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BlSampleArgs {
    /// Family: geo | exp.
    #[arg(long)]
    pub family: String,
    /// key=value list, e.g. lambda_plus=0.5,lambda_minus=0.5 or alpha_plus=.5,alpha_minus=.5.
    #[arg(long, value_delimiter = ',')]
    pub params: Vec<String>,
    #[arg(long = "N")]
    pub n: u32,
    #[arg(long = "M")]
    pub m: u32,
    /// Output field JSON path.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BlIntersectionsArgs {
    /// Line kind: ne | se | vertical | horizontal.
    #[arg(long)]
    pub line: String,
    /// Line index: column i, row j, time t or height x respectively.
    #[arg(long, default_value_t = 0)]
    pub index: i64,
    /// Geometric parameter for the sampled field.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long = "N", default_value_t = 32)]
    pub n: u32,
    #[arg(long = "M", default_value_t = 32)]
    pub m: u32,
    /// Read the field from JSON instead of sampling.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Horizontal-only: stream this many diagonal sites instead of
    /// building a field.
    #[arg(long)]
    pub sites: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum LppCommand {
    /// Solve one instance by DP, broken lines, or both.
    Solve(LppSolveArgs),
    /// Law-of-large-numbers table over a list of widths.
    Lln(LppLlnArgs),
}

#[derive(Debug, Args)]
pub struct LppSolveArgs {
    /// Family: exp | geo.
    #[arg(long)]
    pub family: String,
    /// key=value list: alpha=1 or lambda=0.5.
    #[arg(long, value_delimiter = ',')]
    pub params: Vec<String>,
    #[arg(long = "N")]
    pub n: u32,
    #[arg(long = "M")]
    pub m: u32,
    /// dp | bl | both.
    #[arg(long, default_value = "both")]
    pub method: String,
    /// Import the instance from JSON instead of sampling.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Export the sampled instance to JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LppLlnArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, value_delimiter = ',')]
    pub params: Vec<String>,
    #[arg(long)]
    pub beta: f64,
    #[arg(long = "N-list", value_delimiter = ',', required = true)]
    pub n_list: Vec<u32>,
    #[arg(long)]
    pub trials: u64,
    /// Also record tail frequencies P(|G/N - limit| > delta).
    #[arg(long)]
    pub delta: Option<f64>,
}

/// Everything a command produces.
#[derive(Debug, Serialize)]
pub struct RunOutput {
    pub manifest: RunManifest,
    pub table: ResultTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<serde_json::Value>,
}

fn resolve_seed(cli_seed: Option<u64>) -> Result<(u64, &'static str)> {
    if let Some(s) = cli_seed {
        return Ok((s, "flag"));
    }
    if let Ok(text) = std::env::var("LL_SEED") {
        let s = text
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::parameter(format!("LL_SEED must be a u64, got {text:?}")))?;
        return Ok((s, "env"));
    }
    Ok((rand::random::<u64>(), "entropy"))
}

/// Parses `key=value` parameter lists.
pub fn parse_params(items: &[String]) -> Result<std::collections::BTreeMap<String, f64>> {
    let mut out = std::collections::BTreeMap::new();
    for item in items {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::parameter(format!("expected key=value, got {item:?}")))?;
        let value: f64 = v
            .parse()
            .map_err(|_| Error::parameter(format!("parameter {k} is not a number: {v:?}")))?;
        out.insert(k.trim().to_string(), value);
    }
    Ok(out)
}

/// Runs a parsed command, returning the machine output.
pub fn run(cli: Cli) -> Result<RunOutput> {
    let (seed, seed_source) = resolve_seed(cli.seed)?;
    let threads = cli.threads.unwrap_or_else(num_threads_default);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::parameter(format!("cannot build worker pool: {e}")))?;
    pool.install(|| commands::execute(&cli.command, seed, seed_source, threads))
}

fn num_threads_default() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Full dispatch from raw argv: parse, run, write artifacts, map errors
/// to exit codes.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help/--version as "errors" with success status.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let json = cli.json;
    let quiet = cli.quiet;
    let csv_path = cli.csv.clone();
    let plot_path = cli.plot.clone();
    match run_and_emit(cli, json, quiet, csv_path, plot_path) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_and_emit(
    cli: Cli,
    json: bool,
    quiet: bool,
    csv_path: Option<PathBuf>,
    plot_path: Option<PathBuf>,
) -> Result<i32> {
    let plot_kind_holder;
    let output = {
        let out = run_inner(cli)?;
        plot_kind_holder = out.1;
        out.0
    };
    if let Some(path) = csv_path {
        let file = std::fs::File::create(&path)?;
        output.table.write_csv(file)?;
    }
    if let Some(path) = plot_path {
        let kind = plot_kind_holder.ok_or_else(|| {
            Error::parameter("this command has no plot projection".to_string())
        })?;
        let file = std::fs::File::create(&path)?;
        emit_plot_data(&output.table, kind, file)?;
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&output)?);
    } else if !quiet {
        println!("# seed {} ({})", output.manifest.seed, output.manifest.seed_source);
        print!("{}", output.table.render_text());
        if !output.table.summary.is_empty() {
            println!("summary: {}", serde_json::Value::Object(output.table.summary.clone()));
        }
    }
    Ok(0)
}

fn run_inner(cli: Cli) -> Result<(RunOutput, Option<PlotKind>)> {
    let kind = match &cli.command {
        Command::Arw(ArwCommand::Scan(_)) => Some(PlotKind::PhaseScan),
        Command::Lpp(LppCommand::Lln(_)) => Some(PlotKind::LlnConvergence),
        Command::Bl(BlCommand::Intersections(_)) => Some(PlotKind::IntersectionHist),
        _ => None,
    };
    let output = run(cli)?;
    Ok((output, kind))
}
