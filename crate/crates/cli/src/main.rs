//! `lipminor` command-line tool.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lipminor::acceptance::Profile;
use lipminor::experiments::ExperimentKind;

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[derive(Debug, Parser, Serialize)]
#[command(name = "lipminor", version, about = "Lipschitz minorants of sampled Lévy paths")]
pub struct Cli {
    /// Log level: error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Minorant, contact set and straddling interval of a path read from CSV.
    Minorant(MinorantArgs),
    /// Simulate a two-sided path on the grid `k Δt`, `|k Δt| <= W`, and write it as CSV.
    Simulate(SimulateArgs),
    /// Closed-form quantities for Brownian motion with drift.
    Oracle(OracleArgs),
    /// Integral criteria for a Lévy model.
    Criteria(CriteriaArgs),
    /// Run a Monte Carlo experiment.
    Experiment(ExperimentArgs),
    /// Run the acceptance suite.
    VerifyAll(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct MinorantArgs {
    /// Input CSV with columns `t,value` and optionally `left_value`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub alpha: f64,
    /// Guard band width; defaults to `range / α` clipped to a tenth of the window.
    #[arg(long)]
    pub guard: Option<f64>,
    /// Output CSV with columns `t,m,contact,contaminated`.
    #[arg(long)]
    pub out: PathBuf,
    /// Contact summary JSON; defaults to the output path with a `.summary.json` suffix.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    /// Lévy model as inline JSON or a path to a JSON file.
    #[arg(long, conflicts_with = "beta")]
    pub model: Option<String>,
    /// Drift of unit-variance Brownian motion, used when no model is given.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub window: f64,
    #[arg(long)]
    pub dt: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub replicate: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Variance of the Brownian part.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// Laplace arguments.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
    pub theta: Vec<f64>,
    /// Points at which the zero-drift densities of `K` and `Λ` are tabulated.
    #[arg(long, value_delimiter = ',')]
    pub kappa: Vec<f64>,
    /// Output JSON; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriteriaTest {
    Finint,
    Regularity,
    Rstar,
    Vigon,
    Pkzero,
    Classify,
}

#[derive(Debug, Args, Serialize)]
pub struct CriteriaArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_enum)]
    pub test: CriteriaTest,
    /// Interval `[a, b]` for `finint` and `vigon`; defaults to `[-α, α]`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Killing rate for `vigon`.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Search bracket for `rstar`.
    #[arg(long, default_value_t = 0.0)]
    pub r_lo: f64,
    #[arg(long, default_value_t = 10.0)]
    pub r_hi: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    #[arg(value_parser = parse_kind)]
    pub name: ExperimentKind,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2.5e-4)]
    pub dt: f64,
    /// Half-width of the window; defaults to `ceil(20 / (α - |β|))` for Brownian motion.
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',')]
    pub theta_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub alpha_grid: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_kind(s: &str) -> Result<ExperimentKind, String> {
    s.parse().map_err(|e: lipminor::Error| e.to_string())
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value = "quick", value_parser = parse_profile)]
    pub profile: Profile,
    /// Restrict to these criterion ids.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u32>,
    /// Summary JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse().map_err(|e: lipminor::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .format_timestamp(None)
        .init();
    if let Err(e) = config::init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match commands::run(&cli) {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code().into()
        }
    }
}
