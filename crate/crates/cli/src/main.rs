mod cmd;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{ConfigError, FileConfig};

#[derive(Parser, Debug)]
#[command(name = "strata", version, about = "Stokes-transport near Couette flow: solver, weights and toy models")]
struct Cli {
    #[command(flatten)]
    global: Global,

    /// Print the default configuration file and exit.
    #[arg(long)]
    print_defaults: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

/// Flags accepted by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output directory.
    #[arg(long, global = true, env = "STRATA_OUT", default_value = "strata-out")]
    pub out: PathBuf,

    /// Seed for random initial data and sweeps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Suppress progress and summary output.
    #[arg(long, global = true)]
    pub quiet: bool,

    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact linear evolution with diagnostics.
    Linear(cmd::sim::SimArgs),
    /// Nonlinear pseudo-spectral run with diagnostics and checkpoints.
    Nonlinear(cmd::sim::NonlinearArgs),
    /// Scalar toy models.
    #[command(subcommand)]
    Toy(cmd::toy::ToyCommand),
    /// Weight tables and ratio sweeps.
    #[command(subcommand)]
    Weights(cmd::weights::WeightsCommand),
    /// Log-log slope fit on a column of any emitted CSV.
    Fit(cmd::fit::FitArgs),
}

fn run(cli: Cli) -> Result<()> {
    if cli.print_defaults {
        print!("{}", FileConfig::defaults_toml());
        return Ok(());
    }
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(ConfigError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let g = &cli.global;
    match cli.command {
        None => Err(ConfigError("no subcommand given; see `strata --help`".into()).into()),
        Some(Command::Linear(a)) => cmd::sim::linear(g, &a),
        Some(Command::Nonlinear(a)) => cmd::sim::nonlinear(g, &a),
        Some(Command::Toy(c)) => cmd::toy::run(g, c),
        Some(Command::Weights(c)) => cmd::weights::run(g, c),
        Some(Command::Fit(a)) => cmd::fit::run(g, &a),
    }
}

/// 2 for bad input, 3 for a numerical abort, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<strata_core::Error>() {
            return match e {
                strata_core::Error::InvalidParameter(_) | strata_core::Error::Precondition(_) => 2,
                strata_core::Error::NumericalAbort { .. } => 3,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
