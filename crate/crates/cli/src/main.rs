mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use poissonlin::thompson::Mode;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "poissonlin", version, about = "Numerical checks for linearized Poisson-Lie moment maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Clone, Copy, Serialize, PartialEq, Eq, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Iwasawa-type factorizations, the map E and dressing consistency
    Decompose,
    /// Linearization identities for the 1-form beta
    Linearize,
    /// Feasibility of an eigenvalue / singular value problem
    Thompson,
    /// Transfer of product solutions to dressing-orbit solutions
    Transfer,
    /// Structure-constant and S-matrix identities
    VerifyIdentities,
    /// Liouville volume ratio against the hyperbolic Duflo factor
    VolumeCheck,
    /// Monte Carlo test of the hyperbolic Duflo identity
    DufloTest,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct Options {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Pass/fail threshold; defaults depend on the command
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true, default_value_t = 200)]
    pub bins: usize,
    #[arg(long, global = true, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long = "max-iters", global = true, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long = "in", global = true)]
    pub input_path: Option<PathBuf>,
    #[arg(long = "out", global = true)]
    pub output_path: Option<PathBuf>,
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    #[arg(long, global = true)]
    pub r: Option<usize>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda1: Option<io::FloatList>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda2: Option<io::FloatList>,
    /// Histogram CSV output for duflo-test
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("POISSONLIN_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| anyhow::anyhow!("POISSONLIN_THREADS must be a non-negative integer, got {value:?}"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match commands::run(cli.command, &cli.opts) {
        Ok(outcome) => {
            for name in &outcome.failed {
                eprintln!("verification failed: {name}");
            }
            if outcome.failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
