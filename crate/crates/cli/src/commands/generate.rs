use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use shotqaoa::problems::{generate_maxcut_instance, generate_po_instance, ProblemInstance};
use shotqaoa::seeding::derive_seed;

use crate::CommandResult;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Maxcut,
    Po,
}

#[derive(Parser, Debug)]
pub struct Args {
    /// Problem family.
    #[arg(long, value_enum)]
    kind: Kind,
    /// Vertex / asset count.
    #[arg(long)]
    n: usize,
    /// Number of instances.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Master seed; instance i uses a child seed derived from (seed, i).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out_dir: PathBuf,
}

pub fn run(args: Args) -> CommandResult {
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;
    for i in 0..args.count {
        let child = derive_seed(args.seed, &[i as u64]);
        let (label, instance) = match args.kind {
            Kind::Maxcut => (
                "maxcut",
                ProblemInstance::MaxCut(generate_maxcut_instance(args.n, child)?),
            ),
            Kind::Po => (
                "po",
                ProblemInstance::Portfolio(generate_po_instance(args.n, child)?),
            ),
        };
        let path = args
            .out_dir
            .join(format!("{label}_{}_{}_{i}.json", args.n, args.seed));
        instance
            .save(&path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
