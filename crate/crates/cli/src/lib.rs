//! Command-line front end for `renyi-core`.
//!
//! Every command writes to a caller-supplied sink so the same code backs the
//! `renyi` binary and the tests.

pub mod commands;
pub mod format;
pub mod io;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use renyi_core::divergence::LogBase;
use renyi_core::fuzz::Suite;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Input { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] renyi_core::error::Error),

    #[error("{0}")]
    Usage(String),

    #[error("failed to write output: {0}")]
    Write(#[from] std::io::Error),
}

impl CliError {
    pub fn input(path: &Path, message: impl Into<String>) -> Self {
        CliError::Input {
            path: path.display().to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// How a successful command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// At least one checked inequality failed.
    Violation,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Violation => 1,
        }
    }
}

/// Exit status for input and parameter errors.
pub const EXIT_INPUT_ERROR: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

impl From<BaseArg> for LogBase {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Two => LogBase::Two,
            BaseArg::E => LogBase::E,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorMode {
    Uniform,
    Optimized,
}

impl fmt::Display for PriorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PriorMode::Uniform => "uniform",
            PriorMode::Optimized => "optimized",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Measure {
    Classical,
    Rre,
    Sandwiched,
    Alphaz,
    Umegaki,
    Fidelity,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Classical => "classical",
            Measure::Rre => "rre",
            Measure::Sandwiched => "sandwiched",
            Measure::Alphaz => "alphaz",
            Measure::Umegaki => "umegaki",
            Measure::Fidelity => "fidelity",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "renyi", version, about = "Quantum Rényi divergences, Holevo-Rényi bounds and error exponents")]
pub struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Logarithm base of reported entropies and divergences.
    #[arg(long = "log-base", global = true, value_enum, default_value = "2")]
    pub log_base: BaseArg,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Membership map of the data-processing region over an (α, z) grid.
    Region(RegionArgs),
    /// Exponent bounds for pure-state binary channels over an overlap grid.
    Bounds(BoundsArgs),
    /// Run a randomised verification suite.
    Fuzz(FuzzArgs),
    /// Evaluate a divergence between two state files.
    Eval(EvalArgs),
    /// Check the Holevo-type inequalities on a user ensemble and POVM.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RegionArgs {
    /// Grid covers α in (alpha-min, alpha-max].
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub alpha_max: f64,
    /// Grid covers z in (z-min, z-max].
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub z_max: f64,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub step: f64,
}

impl Default for RegionArgs {
    fn default() -> Self {
        Self {
            alpha_min: 0.0,
            alpha_max: 4.0,
            z_min: 0.0,
            z_max: 4.0,
            step: 0.01,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// Spacing of the overlap grid c = 0, step, ..., 1.
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub step: f64,
    /// Comma-separated s values in [0, 1].
    #[arg(long = "s", value_delimiter = ',', default_value = "1")]
    pub s: Vec<f64>,
    #[arg(long, value_enum, default_value_t = PriorMode::Uniform)]
    pub prior_mode: PriorMode,
}

#[derive(Debug, Clone, Args)]
pub struct FuzzArgs {
    /// dpi, ordering, holevo_renyi, renyi_bound, sibson_bound or proposition.
    #[arg(value_parser = parse_suite)]
    pub suite: Suite,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Dimension (dpi, ordering) or maximum dimension (ensemble suites).
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Force a single Rényi order.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub z: Option<f64>,
    /// Force the alphabet size of sampled ensembles.
    #[arg(long)]
    pub letters: Option<usize>,
    #[arg(long, default_value_t = renyi_core::fuzz::FUZZ_TOL)]
    pub tolerance: f64,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: renyi_core::error::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    pub state_a: PathBuf,
    pub state_b: PathBuf,
    #[arg(long, value_enum)]
    pub measure: Measure,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub z: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub ensemble: PathBuf,
    #[arg(long)]
    pub povm: PathBuf,
    /// Comma-separated orders.
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.5,0.7,1.5,2,3")]
    pub alpha: Vec<f64>,
    /// Use this z for every order instead of the optimal one.
    #[arg(long)]
    pub z: Option<f64>,
}

/// Runs the parsed command against `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let ctx = commands::Context {
        seed: cli.seed,
        base: cli.log_base.into(),
    };
    match &cli.command {
        Command::Region(a) => commands::region(&ctx, a, out),
        Command::Bounds(a) => commands::bounds(&ctx, a, out),
        Command::Fuzz(a) => commands::fuzz(&ctx, a, out),
        Command::Eval(a) => commands::eval(&ctx, a, out),
        Command::Check(a) => commands::check(&ctx, a, out),
    }
}
