//! Command-line driver for the donor/acceptor transfer simulator.
//!
//! Four subcommands around one JSON config:
//!
//! - `dynamics`: Bloch trajectories on a time grid, one CSV per temperature;
//! - `crossover`: the coherent/incoherent boundary temperature over a
//!   parameter sweep;
//! - `bath`: frequency- and time-domain tables of the environment with
//!   closed-form/quadrature cross-checks;
//! - `sweep`: trajectory summaries over a cartesian parameter grid.
//!
//! Every run writes its data as CSV plus a `manifest.json` describing what
//! was computed. Exit codes: 0 success, 2 configuration error, 3 numerical
//! failure, 4 partial failure (some sweep points failed but results were
//! written).

mod commands;
mod config;
mod manifest;
mod output;

use std::num::NonZeroUsize;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{RegimeChoice, RunConfig};

/// Failure classes, in order of exit precedence.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration (exit 2).
    #[error("{0}")]
    Config(String),
    /// A solver or quadrature failed to converge (exit 3).
    #[error("{0}")]
    Numerical(String),
    /// Some grid points failed but the run produced output (exit 4).
    #[error("{0}")]
    PartialSweep(String),
    /// Filesystem trouble (exit 3).
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
            CliError::PartialSweep(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Numerical(m)
            | CliError::PartialSweep(m)
            | CliError::Io(m) => m,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "duet",
    version,
    about = "Donor/acceptor excitation transfer in a spatially correlated phonon field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long, value_name = "path")]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, value_name = "dir", default_value = "out")]
    out: PathBuf,
    /// Override the transform tolerance from the config.
    #[arg(long, value_name = "float")]
    tol: Option<f64>,
    /// Size of the worker pool for parallel grids (default: all cores).
    #[arg(long, value_name = "n")]
    threads: Option<NonZeroUsize>,
    /// Override the generator regime (auto, resonant, full, weak,
    /// high-temperature).
    #[arg(long, value_name = "name")]
    regime: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the Bloch equation and write one trajectory per temperature.
    Dynamics {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Trace the coherent/incoherent boundary temperature.
    Crossover {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tabulate the environment: spectra, rates, and displacement phase.
    Bath {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Summarize trajectories over a cartesian parameter grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn load(common: &CommonArgs) -> Result<RunConfig, CliError> {
    if let Some(n) = common.threads {
        // Ignore a second initialization (only possible in tests that call
        // run twice in one process); the pool is process-global.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.get())
            .build_global();
    }
    let mut config = RunConfig::load(&common.config)?;
    if let Some(tol) = common.tol {
        if !(tol.is_finite() && tol > 0.0 && tol < 1e-2) {
            return Err(CliError::Config(format!(
                "--tol must be in (0, 1e-2), got {tol}"
            )));
        }
        config.tolerance = Some(tol);
    }
    if let Some(name) = &common.regime {
        config.regime = RegimeChoice::parse_flag(name)?;
    }
    Ok(config)
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Dynamics { common } => {
            let config = load(common)?;
            commands::dynamics::run(&config, &common.out)
        }
        Command::Crossover { common } => {
            let config = load(common)?;
            commands::crossover::run(&config, &common.out)
        }
        Command::Bath { common } => {
            let config = load(common)?;
            commands::bath::run(&config, &common.out)
        }
        Command::Sweep { common } => {
            let config = load(common)?;
            commands::sweep::run(&config, &common.out)
        }
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}
