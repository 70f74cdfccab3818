//! `opcap`: Bayesian calibration and Monte Carlo capital for
//! operational-risk frequency/severity models.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical
//! non-convergence, 4 infeasible elicitation.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use opcap_core::Error;

use crate::config::Overrides;

#[derive(Parser)]
#[command(
    name = "opcap",
    version,
    about = "Operational-risk priors, posteriors and capital"
)]
struct Cli {
    /// JSON run configuration (one block per command).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the seed of the simulate block.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the replication count of the simulate block.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Overrides the quantile level of the simulate block.
    #[arg(long, global = true)]
    quantile: Option<f64>,

    /// Overrides the output path (file for fit-prior/update/calibrate,
    /// directory for simulate).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit prior hyperparameters from expert opinions.
    FitPrior,
    /// Fold observations into a posterior trajectory CSV.
    Update,
    /// Estimate hyperparameters from a multi-bank count panel.
    Calibrate,
    /// Monte Carlo annual-loss distributions and quantile capital.
    Simulate,
}

fn run(cli: Cli) -> opcap_core::Result<()> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::invalid("--config <file> is required"))?;
    let mut cfg = config::load(config_path)?;
    let overrides = Overrides {
        seed: cli.seed,
        samples: cli.samples,
        quantile: cli.quantile,
    };
    let out = std::io::stdout();
    let mut out = out.lock();
    match cli.command {
        Command::FitPrior => {
            let mut block = cfg
                .fit_prior
                .take()
                .ok_or_else(|| Error::invalid("config has no fit_prior block"))?;
            if let Some(path) = cli.out {
                block.out = Some(path);
            }
            commands::cmd_fit_prior(&block, &mut out)
        }
        Command::Update => {
            let block = cfg
                .update
                .take()
                .ok_or_else(|| Error::invalid("config has no update block"))?;
            commands::cmd_update(&block, cli.out.as_ref()).map(|_| ())
        }
        Command::Calibrate => {
            let mut block = cfg
                .calibrate
                .take()
                .ok_or_else(|| Error::invalid("config has no calibrate block"))?;
            if let Some(path) = cli.out {
                block.out = Some(path);
            }
            commands::cmd_calibrate(&block, &mut out)
        }
        Command::Simulate => {
            let mut block = cfg
                .simulate
                .take()
                .ok_or_else(|| Error::invalid("config has no simulate block"))?;
            if let Some(path) = cli.out {
                block.out_dir = Some(path);
            }
            commands::cmd_simulate(&block, &overrides, cfg.audit, &mut out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Invalid(_) | Error::Io(_) => 2,
                Error::NonConvergence(_) => 3,
                Error::Infeasible(_) => 4,
            };
            ExitCode::from(code)
        }
    }
}
