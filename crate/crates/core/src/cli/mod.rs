//! Command-line front end.
//!
//! Exit codes: 0 success or no evidence against infinite divisibility,
//! 1 usage error, 2 data error, 3 infinite divisibility rejected.

mod commands;
pub mod csv;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_REJECT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "infdiv",
    version,
    about = "Characteristic-function bounds and a bootstrap test of infinite divisibility"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a sample for infinite divisibility; writes a JSON report.
    Test(TestArgs),
    /// Tabulate a bound against the (empirical) characteristic function.
    Bounds(BoundsArgs),
    /// Fractional absolute moments against the Gaussian bound.
    Moments(MomentsArgs),
    /// Monte Carlo rejection rates for a registry distribution.
    Simulate(SimulateArgs),
    /// First positive root of sin z - z cos z.
    Roots(RootsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    #[value(name = "1")]
    Th1,
    #[value(name = "1a")]
    Th1a,
    #[value(name = "2")]
    Th2,
    #[value(name = "2a")]
    Th2a,
    #[value(name = "3")]
    Th3,
    #[value(name = "4")]
    Th4,
    #[value(name = "21")]
    Th21,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// CSV file with a numeric column (`-` reads stdin).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Column to read: 1-based index or header name.
    #[arg(long)]
    pub column: Option<String>,
    /// Registry distribution: gaussian, sympoisson, laplace, uniform, rademacher, binomsym, triangular.
    #[arg(long)]
    pub dist: Option<String>,
    /// Sample size drawn from --dist.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TestFlags {
    /// Comma-separated statistics from t3, t4, tmom, t2.
    #[arg(long, default_value = "t3,t4")]
    pub stats: String,
    /// Bootstrap replicates (at least 99).
    #[arg(long = "B", default_value_t = 199)]
    pub bootstrap_b: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Largest grid point; defaults to 8 / sigma.
    #[arg(long)]
    pub grid_max: Option<f64>,
    #[arg(long, default_value_t = 256)]
    pub grid_points: usize,
    /// m-divisibility hypothesis; adds statistic t2.
    #[arg(long)]
    pub m: Option<u32>,
    /// Moment order for tmom, in (0, 2).
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Data is already symmetric about 0; skip symmetrization.
    #[arg(long)]
    pub symmetric: bool,
    /// Support radius of the analyzed variable, used by t2.
    #[arg(long)]
    pub support_radius: Option<f64>,
    /// Cap on pairwise differences used by tmom.
    #[arg(long, default_value_t = 20_000)]
    pub max_pairs: usize,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub test: TestFlags,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Bound to tabulate.
    #[arg(long, value_enum)]
    pub th: BoundKind,
    /// m for bounds 2 and 2a.
    #[arg(long)]
    pub m: Option<u32>,
    /// Exponent gamma > 1 for bound 21.
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    /// Support radius of the analyzed variable (for data: of X - X').
    #[arg(long)]
    pub support_radius: Option<f64>,
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long)]
    pub grid_max: Option<f64>,
    #[arg(long, default_value_t = 256)]
    pub grid_points: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Comma-separated orders in (0, 2).
    #[arg(long, default_value = "0.5,1,1.5")]
    pub r: String,
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long, default_value_t = 20_000)]
    pub max_pairs: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub dist: String,
    /// Comma-separated sample sizes.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub test: TestFlags,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Result of a command: the rendered output and its exit code.
pub(crate) struct Outcome {
    pub text: String,
    pub code: i32,
    pub warnings: Vec<String>,
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(0) => Err(Error::InvalidArgument(
            "--threads must be at least 1".into(),
        )),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start thread pool: {e}")))?
            .install(f),
    }
}

fn emit(out: &OutputArgs, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &out.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io(e.to_string())),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let out = match &cli.command {
        Command::Test(a) => &a.out,
        Command::Bounds(a) => &a.out,
        Command::Moments(a) => &a.out,
        Command::Simulate(a) => &a.out,
        Command::Roots(a) => &a.out,
    };
    let result = in_pool(out.threads, || match &cli.command {
        Command::Test(a) => commands::cmd_test(a),
        Command::Bounds(a) => commands::cmd_bounds(a),
        Command::Moments(a) => commands::cmd_moments(a),
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Roots(a) => commands::cmd_roots(a),
    })
    .and_then(|outcome| emit(out, &outcome.text, stdout).map(|_| outcome));
    match result {
        Ok(outcome) => {
            for w in &outcome.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            error_code(&e)
        }
    }
}
