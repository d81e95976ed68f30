//! Command-line front end: every computation of the library is reachable as
//! a subcommand that writes plot-ready CSV or JSON.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Parser)]
#[command(
    name = "coupled-vdp",
    version,
    about = "Stability of the in-phase mode of two delay-coupled van der Pol oscillators",
    long_about = "Analyzes when the in-phase periodic mode of two van der Pol oscillators \
                  with delayed velocity coupling loses stability: closed-form bifurcation \
                  curves, perturbation series for the critical delay, characteristic-equation \
                  root refinement, and direct simulation of both the averaged slow flow and \
                  the full system."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitude and frequency of the in-phase mode over a parameter grid
    Inphase(InphaseArgs),
    /// Closed-form bifurcation curves (Hopf, saddle-node, mode-birth)
    Curves(CurvesArgs),
    /// Critical delay versus coupling: series truncations and simulation
    Fig1(Fig1Args),
    /// Maximum series-vs-simulation errors for eps in {0.1, 0.3, 0.5}
    Table1(Table1Args),
    /// Integrate the slow flow or the full system at one parameter point
    Simulate(SimulateArgs),
    /// Series and Newton-refined Hopf point at one (alpha, eps)
    Hopf(HopfArgs),
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Shared integration/bisection tuning for the scan-backed commands.
#[derive(Args)]
struct ScanTuning {
    /// Integration step in slow time
    #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
    step: f64,
    /// Minimum growth-probe window in slow time
    #[arg(long, default_value_t = 60.0, allow_hyphen_values = true)]
    window: f64,
    /// Bisection tolerance on the critical delay
    #[arg(long, default_value_t = 2e-4, allow_hyphen_values = true)]
    tol: f64,
}

#[derive(Args)]
struct AlphaRange {
    /// Single coupling value (overrides the range)
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_max: Option<f64>,
    #[arg(long, default_value_t = 20)]
    alpha_steps: usize,
}

#[derive(Args)]
struct InphaseArgs {
    #[command(flatten)]
    alpha: AlphaRange,
    /// Single delay value (overrides the delay range)
    #[arg(long = "T", allow_hyphen_values = true)]
    delay: Option<f64>,
    #[arg(long = "T-min", allow_hyphen_values = true)]
    delay_min: Option<f64>,
    #[arg(long = "T-max", allow_hyphen_values = true)]
    delay_max: Option<f64>,
    #[arg(long = "T-steps", default_value_t = 20)]
    delay_steps: usize,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    eps: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct CurvesArgs {
    #[command(flatten)]
    alpha: AlphaRange,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct Fig1Args {
    /// Perturbation parameter
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    eps: f64,
    #[command(flatten)]
    alpha: AlphaRange,
    #[command(flatten)]
    tuning: ScanTuning,
    /// Emit every scan column (errors, Newton value) instead of the
    /// four-curve view
    #[arg(long)]
    full: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct Table1Args {
    /// Number of coupling grid points
    #[arg(long, default_value_t = 20)]
    grid: usize,
    #[command(flatten)]
    tuning: ScanTuning,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SystemKind {
    /// Averaged amplitude equations with delayed arguments
    Slow,
    /// The coupled pair of oscillators itself
    Full,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = SystemKind::Slow)]
    system: SystemKind,
    /// Coupling strength
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Delay, in radians of fast time
    #[arg(long = "T", allow_hyphen_values = true)]
    delay: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    eps: f64,
    /// Perturbation-channel sign, +1 or -1 (slow flow only)
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    beta: i64,
    /// Integration step (slow time for the slow flow, fast time otherwise)
    #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
    step: f64,
    /// Integration span
    #[arg(long, default_value_t = 60.0, allow_hyphen_values = true)]
    window: f64,
    /// Constant slow-flow history
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    a0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b0: f64,
    /// History offset on oscillator 1's position (full system)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    perturb_x: f64,
    /// History offset on oscillator 1's velocity (full system)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    perturb_v: f64,
    /// Draw the slow-flow history from this seed instead of (a0, b0)
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct HopfArgs {
    /// Coupling strength
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    eps: f64,
    /// Series truncation (1, 2 or 3 terms)
    #[arg(long, default_value_t = 3)]
    n_terms: usize,
    /// Newton residual tolerance
    #[arg(long, default_value_t = 1e-10, allow_hyphen_values = true)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    #[command(flatten)]
    out: OutArgs,
}

/// Failure classes mapped onto the exit-status contract: configuration
/// errors exit 2, numerical failures 3, I/O problems 1.
#[derive(Debug)]
pub enum AppError {
    Config(String),
    Numeric(String),
    Io(std::io::Error),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Numeric(_) => 3,
            AppError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(m) => write!(f, "configuration error: {m}"),
            AppError::Numeric(m) => write!(f, "numerical failure: {m}"),
            AppError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Inphase(args) => commands::inphase(args),
        Command::Curves(args) => commands::curves(args),
        Command::Fig1(args) => commands::fig1(args),
        Command::Table1(args) => commands::table1(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Hopf(args) => commands::hopf(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
