use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crossdiff_cli::config::CommandKind;
use crossdiff_cli::run::{execute, RunArgs};

/// Spectral solver for strongly coupled reaction-diffusion systems.
#[derive(Parser)]
#[command(name = "crossdiff", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Output directory, overriding output.directory from the config.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Refuse models whose conditions fail instead of noting them.
    #[arg(long)]
    strict: bool,

    /// Proceed even when an eigenvalue leaves the closed right half-plane.
    #[arg(long)]
    allow_h0_violation: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the diffusion matrix and write report.json.
    Analyze(CommonArgs),
    /// Advance the initial field through the configured time grid.
    Simulate(CommonArgs),
    /// Solve the regularized stationary problem on a Dirichlet box.
    Stationary(CommonArgs),
    /// Run the two-component equal-diagonal preset model.
    Kouachi(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match cli.command {
        Command::Analyze(args) => (CommandKind::Analyze, args),
        Command::Simulate(args) => (CommandKind::Simulate, args),
        Command::Stationary(args) => (CommandKind::Stationary, args),
        Command::Kouachi(args) => (CommandKind::Kouachi, args),
    };
    let args = RunArgs {
        config_path: common.config,
        out: common.out,
        strict: common.strict,
        allow_h0_violation: common.allow_h0_violation,
    };
    ExitCode::from(execute(kind, &args) as u8)
}
