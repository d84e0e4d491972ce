use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use shotqaoa::protocol::{
    build_protocol_landscape, run_protocol, Backend, OptimizerKind, ProtocolConfig,
};

use crate::record::ProtocolRecord;
use crate::CommandResult;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BackendArg {
    Exact,
    Sampled,
    Landscape,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OptimizerArg {
    Linear,
    NelderMead,
    Spsa,
}

#[derive(Parser, Debug)]
pub struct Args {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    /// QAOA depth.
    #[arg(long)]
    p: usize,
    /// Total shot budget.
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    /// Evaluations after the initial 2p+1.
    #[arg(long, default_value_t = 2)]
    extra_evals: usize,
    /// Initial step size in scaled parameter space (family default if unset).
    #[arg(long)]
    rhobeg: Option<f64>,
    #[arg(long, value_enum, default_value_t = BackendArg::Sampled)]
    backend: BackendArg,
    /// Grid resolution for the landscape backend.
    #[arg(long, default_value_t = 64)]
    grid_resolution: usize,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Linear)]
    optimizer: OptimizerArg,
    /// SPSA gain a.
    #[arg(long, default_value_t = 0.2)]
    spsa_a: f64,
    /// SPSA gain c.
    #[arg(long, default_value_t = 0.1)]
    spsa_c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed-parameter table override.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Output file for the result record (stdout if unset).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> CommandResult {
    let instance = super::load_instance(&args.instance)?;
    let table = super::load_table(args.table.as_deref())?;
    let optimizer = match args.optimizer {
        OptimizerArg::Linear => OptimizerKind::LinearTrustRegion,
        OptimizerArg::NelderMead => OptimizerKind::NelderMead,
        OptimizerArg::Spsa => OptimizerKind::Spsa {
            a: args.spsa_a,
            c: args.spsa_c,
        },
    };
    let config = ProtocolConfig {
        total_shots: args.shots,
        extra_evals: args.extra_evals,
        rhobeg: args.rhobeg,
        optimizer,
        seed: args.seed,
    };
    let (backend, backend_label) = match args.backend {
        BackendArg::Exact => (Backend::ExactSim, "exact"),
        BackendArg::Sampled => (Backend::SampledSim, "sampled"),
        BackendArg::Landscape => {
            let grid =
                build_protocol_landscape(&instance, args.p, &table, args.grid_resolution)?;
            (Backend::LandscapeOracle(Arc::new(grid)), "landscape")
        }
    };
    let result = run_protocol(&instance, args.p, &config, &table, &backend)?;
    let record = ProtocolRecord {
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        instance: args.instance.display().to_string(),
        p: args.p,
        backend: backend_label.to_string(),
        config,
        result,
    };
    let line = record.to_json_line();
    match &args.out {
        None => println!("{line}"),
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .with_context(|| format!("writing {}", path.display()))?;
            writeln!(file, "{line}")?;
        }
    }
    Ok(())
}
