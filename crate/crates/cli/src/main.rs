//! `shotqaoa`: generate problem instances, run the parameter-setting
//! protocol, precompute landscapes, and sweep benchmark grids.
//!
//! Exit codes: 0 success, 2 usage, 3 infeasible shot budget, 4 degenerate
//! instance (initial parameters already optimal), 5 I/O failure.

mod commands;
mod record;

use anyhow::Result;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "shotqaoa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random problem instance files.
    Generate(commands::generate::Args),
    /// Run the end-to-end parameter-setting protocol on one instance.
    Protocol(commands::protocol::Args),
    /// Precompute a (mean, std) energy landscape and export it.
    Landscape(commands::landscape::Args),
    /// Run a benchmark sweep from a manifest.
    Bench(commands::bench::Args),
    /// Re-aggregate per-run records into report CSVs.
    Report(commands::report::Args),
}

fn main() {
    init_worker_pool();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => commands::generate::run(args),
        Command::Protocol(args) => commands::protocol::run(args),
        Command::Landscape(args) => commands::landscape::run(args),
        Command::Bench(args) => commands::bench::run(args),
        Command::Report(args) => commands::report::run(args),
    };
    if let Err(err) = outcome {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}

/// Honors `SHOTQAOA_WORKERS` for the rayon pool size.
fn init_worker_pool() {
    if let Ok(value) = std::env::var("SHOTQAOA_WORKERS") {
        if let Ok(workers) = value.parse::<usize>() {
            if workers >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build_global();
            }
        }
    }
}

fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<shotqaoa::Error>() {
            return match core {
                shotqaoa::Error::InfeasibleBudget { .. } => 3,
                shotqaoa::Error::DegenerateInstance => 4,
                shotqaoa::Error::Io(_) => 5,
                _ => 1,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 5;
        }
    }
    1
}

type CommandResult = Result<()>;
