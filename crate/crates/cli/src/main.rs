//! `hostlab` — batch runner for the orbit, Fourier and ergodic experiments.
//!
//! Every subcommand writes versioned CSV tables and a JSON summary into the
//! output directory. Exit status: 0 when every hard check passes (soft
//! threshold misses only warn, unless `--strict`), 1 on a failed check, 2 on
//! configuration errors, 3 when a resource or precision budget runs out.

mod commands;
mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigError, RunConfig};

#[derive(Parser)]
#[command(name = "hostlab", version = run::VERSION, about = "Equidistribution experiments for ×b orbits of ×a-invariant measures")]
struct Cli {
    /// Flat JSON file with run parameters; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Treat soft-threshold misses as failures.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weyl sums along ×b orbits of sampled points.
    Weyl(RunConfig),
    /// Certify the C¹ decay bound and the smoothing bound on batteries.
    FourierCert(RunConfig),
    /// Integrated Fourier quantity against k, with its bound.
    ProofChain(RunConfig),
    /// Cesàro averages of martingale differences.
    Martingale(RunConfig),
    /// Joint averages along a rotation and the times [βn].
    TimeChange(RunConfig),
    /// Equivariance of conditional measures on random (past, cylinder) pairs.
    Equivariance(RunConfig),
    /// Dependent-pair and rational-point negative controls.
    Controls(RunConfig),
}

impl Command {
    fn split(&self) -> (&'static str, &RunConfig) {
        match self {
            Command::Weyl(c) => ("weyl", c),
            Command::FourierCert(c) => ("fourier-cert", c),
            Command::ProofChain(c) => ("proof-chain", c),
            Command::Martingale(c) => ("martingale", c),
            Command::TimeChange(c) => ("time-change", c),
            Command::Equivariance(c) => ("equivariance", c),
            Command::Controls(c) => ("controls", c),
        }
    }
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("HOSTLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| config::config_err(format!("HOSTLAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.is::<ConfigError>() {
        return 2;
    }
    match err.downcast_ref::<hostlab::Error>() {
        Some(e) if e.is_config_error() => 2,
        Some(_) => 3,
        None => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, flags) = cli.command.split();
    let result = init_threads()
        .and_then(|_| RunConfig::load(cli.config.as_deref(), flags))
        .and_then(|cfg| commands::dispatch(name, &cfg));
    match result {
        Ok(outcome) => {
            if outcome.hard_failures > 0 || (cli.strict && outcome.soft_failures > 0) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("hostlab {name}: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
