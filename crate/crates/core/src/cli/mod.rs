//! The `bertrand-lab` command line.
//!
//! Exit codes: 0 pass, 1 statistical failure, 2 usage error, 3 degenerate
//! data. Every report is a function of the flags and seed only, so repeated
//! runs are byte-identical whatever `--workers` is.

mod commands;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::samplers::Method;

pub use commands::{
    recorded_check, stick_counts, stick_seed, RecordedCheck, StickCounts, RECORDED_ATTEMPTS, RECORDED_LONG,
    RECORDED_SUCCESSES,
};
pub use output::{flatten_json, render_csv};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_STATISTICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

pub const SEED_ENV: &str = "BERTRAND_LAB_SEED";
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "bertrand-lab", version, about = "Random-chord procedures, their densities and their symmetries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate P(chord longer than the triangle side) for one procedure.
    Simulate(SimulateArgs),
    /// Goodness-of-fit of a procedure against its density family.
    Gof(GofArgs),
    /// Transformation-group invariance test.
    Symmetry(SymmetryArgs),
    /// All five procedures at the stick experiment's sample size, with
    /// predictive checks of the hand-performed counts.
    Replicate(ReplicateArgs),
    /// Exact and quadrature probabilities, no sampling.
    Analytic(AnalyticArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Falls back to $BERTRAND_LAB_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include wall-clock time; the output is then no longer reproducible.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub method: Method,
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Histogram of chord length / R over [0, 2] with this many bins.
    #[arg(long)]
    pub hist_bins: Option<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GofTarget {
    Q1,
    Q2,
    F1,
    F2,
    Auto,
}

#[derive(Debug, Clone, Args)]
pub struct GofArgs {
    #[arg(long)]
    pub method: Method,
    #[arg(long, value_enum, default_value_t = GofTarget::Auto)]
    pub target: GofTarget,
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SymmetryArgs {
    #[arg(long)]
    pub method: Method,
    /// rotation, concentric-scale, shared-lines, shared-points,
    /// tangent-scale, tangent-translation or spinner-axis.
    #[arg(long)]
    pub action: String,
    /// Angle, scale factor or offset of the action.
    #[arg(long, allow_negative_numbers = true)]
    pub param: Option<f64>,
    /// Second shift of spinner-axis (the beta shift).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub param2: f64,
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReplicateArgs {
    #[arg(long, default_value_t = 700)]
    pub n: u64,
    /// Repeat the stick predictive check over this many derived seeds.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyticArgs {
    /// Also report the scale-invariant family member with this exponent.
    #[arg(long)]
    pub q: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// What a command produced, before rendering.
pub(crate) struct Outcome {
    pub doc: serde_json::Value,
    pub histogram: Option<crate::montecarlo::Histogram>,
    pub code: i32,
    pub notes: Vec<String>,
}

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Degenerate(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Degenerate(_) => EXIT_DEGENERATE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Degenerate(m) => m,
        }
    }
}

fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, CliError> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer"))),
        (None, None) => Ok(0),
    }
}

/// Parses `args` (program name first) and runs the command. `env_seed` is
/// the value of [`SEED_ENV`], if set.
pub fn run_with<I, S>(args: I, env_seed: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let common = match &cli.command {
        Command::Simulate(a) => &a.common,
        Command::Gof(a) => &a.common,
        Command::Symmetry(a) => &a.common,
        Command::Replicate(a) => &a.common,
        Command::Analytic(a) => &a.common,
    }
    .clone();
    let result = resolve_seed(common.seed, env_seed).and_then(|seed| {
        if common.workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        let started = std::time::Instant::now();
        let mut outcome = match &cli.command {
            Command::Simulate(a) => commands::simulate(a, seed),
            Command::Gof(a) => commands::gof(a, seed),
            Command::Symmetry(a) => commands::symmetry(a, seed),
            Command::Replicate(a) => commands::replicate(a, seed),
            Command::Analytic(a) => commands::analytic(a),
        }?;
        if common.timing {
            if let serde_json::Value::Object(m) = &mut outcome.doc {
                m.insert("wall_time_ms".into(), (started.elapsed().as_millis() as u64).into());
            }
        }
        Ok(outcome)
    });
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            return e.code();
        }
    };
    for note in &outcome.notes {
        let _ = writeln!(stderr, "{note}");
    }
    let text = match common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.doc).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            // the histogram goes into its own table
            let mut doc = outcome.doc.clone();
            if let serde_json::Value::Object(m) = &mut doc {
                m.shift_remove("histogram");
            }
            render_csv(&doc, outcome.histogram.as_ref())
        }
    };
    let written = match &common.out {
        Some(path) => std::fs::write(path, text.as_bytes())
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_USAGE;
    }
    outcome.code
}

/// Entry point for the binary: process arguments and environment, real
/// stdout and stderr.
pub fn run() -> i32 {
    let env_seed = std::env::var(SEED_ENV).ok();
    run_with(
        std::env::args_os(),
        env_seed.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
