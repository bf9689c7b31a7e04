//! `cgerm`: batch front end for the complex-germ library.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use complex_germ::moyal::OmegaConvention;

use crate::error::{CliError, CliResult};
use crate::output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "cgerm", version, about = "Moyal algebra, complex-germ propagation and diagram tools")]
struct Cli {
    /// TOML configuration for the command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV and JSON files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Pass/fail tolerance; exceeding it exits with status 3.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Convention {
    Operator,
    Reversed,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate a Gaussian packet and compare with the grid solver.
    Propagate,
    /// Packet vs grid solver with snapshots, or a random quadratic suite.
    CompareOracle {
        /// Run this many random quadratic cases instead of a config.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Print the star product of two symbols.
    Star {
        left: String,
        right: String,
        /// Sign convention of the symplectic form.
        #[arg(long, value_enum, default_value = "operator")]
        convention: Convention,
    },
    /// Maslov index of the linearised flow along a trajectory.
    Maslov,
    /// Canonical operator: packet superposition vs stationary phase.
    Canonical,
    /// Enumerate (and optionally evaluate) vacuum-to-leg diagrams.
    Diagrams {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        legs: usize,
    },
    /// Tree-level quantum series against the classical solution.
    TreeCheck,
}

fn require_config(cli: &Cli) -> CliResult<&PathBuf> {
    cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required for this command".into()))
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(t) = cli.tol {
        if !(t > 0.0) {
            return Err(CliError::Config(format!("--tol must be positive, got {t}")));
        }
    }
    match &cli.command {
        Command::Star { left, right, convention } => {
            let conv = match convention {
                Convention::Operator => OmegaConvention::Operator,
                Convention::Reversed => OmegaConvention::Reversed,
            };
            commands::star::run(left, right, conv)
        }
        Command::Propagate => {
            let cfg = config::load(require_config(cli)?)?;
            commands::propagate::run(&cfg, &OutDir::create(&cli.out)?, cli.tol)
        }
        Command::CompareOracle { random: Some(n) } => {
            commands::compare::run_random(*n, cli.seed, &OutDir::create(&cli.out)?, cli.tol)
        }
        Command::CompareOracle { random: None } => {
            let cfg = config::load(require_config(cli)?)?;
            commands::compare::run(&cfg, &OutDir::create(&cli.out)?, cli.tol)
        }
        Command::Maslov => {
            let cfg = config::load(require_config(cli)?)?;
            commands::maslov::run(&cfg, &OutDir::create(&cli.out)?)
        }
        Command::Canonical => {
            let cfg = config::load(require_config(cli)?)?;
            commands::canonical::run(&cfg, &OutDir::create(&cli.out)?)
        }
        Command::Diagrams { vertices, legs } => {
            let eval = cli.config.as_ref().map(|p| config::load(p)).transpose()?;
            commands::diagrams::run(*vertices, *legs, eval.as_ref(), &OutDir::create(&cli.out)?)
        }
        Command::TreeCheck => {
            let cfg = match &cli.config {
                Some(p) => config::load(p)?,
                None => config::TreeConfig::default(),
            };
            commands::tree::run(&cfg, &OutDir::create(&cli.out)?, cli.tol)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(4)
        }
    }
}
