use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use commands::Kind;
use output::Output;

/// Batch runner for cusp asymptotics experiments. Each subcommand reads one TOML config
/// and writes JSON/CSV results to the output directory.
#[derive(Parser)]
#[command(name = "cuspkit", version)]
struct Cli {
    /// Output directory (default: $CUSP_OUT_DIR, then ./cuspkit-out).
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Indicial roots and the index sets E+, Ê+.
    Indicial { config: PathBuf },
    /// Exact x log x coefficient from Chern data.
    ChernCoeff { config: PathBuf },
    /// Linear radial problem (Δ − λ)u = f.
    SolveLinear { config: PathBuf },
    /// Radial Monge–Ampère equation log(1 + Δu) = u + F.
    SolveMa { config: PathBuf },
    /// Normalized flow of the potential.
    Flow { config: PathBuf },
    /// Fit a sampled field to a truncated expansion.
    FitExpansion { config: PathBuf },
    /// Monge–Ampère solve followed by x log x detection.
    LogtermPipeline { config: PathBuf },
    /// Run many configs concurrently, one output subdirectory each.
    Sweep { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = Output::resolve(cli.out);
    let (kind, path) = match cli.command {
        Command::Indicial { config } => (Kind::Indicial, config),
        Command::ChernCoeff { config } => (Kind::ChernCoeff, config),
        Command::SolveLinear { config } => (Kind::SolveLinear, config),
        Command::SolveMa { config } => (Kind::SolveMa, config),
        Command::Flow { config } => (Kind::Flow, config),
        Command::FitExpansion { config } => (Kind::FitExpansion, config),
        Command::LogtermPipeline { config } => (Kind::LogtermPipeline, config),
        Command::Sweep { config } => (Kind::Sweep, config),
    };
    let result = if kind == Kind::Sweep {
        commands::sweep::run(&path, &out)
    } else {
        commands::run(kind, &path, &out).map(|msg| (msg, 0))
    };
    match result {
        Ok((msg, code)) => {
            println!("{msg}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
