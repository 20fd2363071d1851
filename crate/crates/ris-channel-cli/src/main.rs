//! Batch driver for the five experiment families: far-field pattern
//! inspection, envelope distribution fits, shape-factor sweeps, outage
//! curves, and multi-access sum-rate sweeps.
//!
//! Every run is described by a TOML scenario file plus an explicit seed, and
//! every output CSV embeds the resolved scenario in its header, so a rerun
//! with the same inputs reproduces the artifact byte for byte.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod config;
mod envelope;
mod keff;
mod outage;
mod output;
mod pattern;
mod sumrate;

// ─────────────────────────────────────────────────────────────────────────────
// Command line surface
// ─────────────────────────────────────────────────────────────────────────────

#[derive(Parser)]
#[command(name = "ris-channel", version, about = "RIS-assisted channel model experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Far-field reflection pattern of a configured surface
    Pattern(RunArgs),
    /// Envelope samples for one scenario, with fitted and analytic shape parameters
    EnvelopeDist(RunArgs),
    /// Inverse-shape-factor sweep across element counts and power ratios
    KeffSweep(RunArgs),
    /// Outage curves: Monte Carlo next to the analytic form
    Outage(RunArgs),
    /// Sum rate of the multi-access schemes swept over the steering angle
    MaSumrate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario description file (TOML)
    #[arg(long)]
    config: PathBuf,

    /// Base seed for every Monte Carlo stream of this run
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output path prefix; the command appends `.csv` suffixes
    #[arg(long)]
    out: String,

    /// Trials per Monte Carlo point (default depends on the command)
    #[arg(long)]
    trials: Option<usize>,

    /// Also write a gnuplot script next to each CSV
    #[arg(long)]
    plot_script: bool,
}

// ─────────────────────────────────────────────────────────────────────────────
// Failure taxonomy: the exit code is part of the interface
// ─────────────────────────────────────────────────────────────────────────────

/// What went wrong, carrying the exit code contract: 2 for configuration
/// problems, 3 for scenarios that are valid but cannot be computed, 4 for
/// filesystem trouble.
pub enum Failure {
    Config(String),
    Infeasible(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Failure::Infeasible(msg) => write!(f, "infeasible scenario: {msg}"),
            Failure::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Pattern(args) => pattern::run(args),
        Command::EnvelopeDist(args) => envelope::run(args),
        Command::KeffSweep(args) => keff::run(args),
        Command::Outage(args) => outage::run(args),
        Command::MaSumrate(args) => sumrate::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("ris-channel: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
