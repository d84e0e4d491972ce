use std::path::PathBuf;

use anyhow::Context;
use clap::Parser;
use shotqaoa::bench::{aggregate_cell, BenchManifest, ReportRow};

use crate::CommandResult;

use super::bench::{cell_file, cells_for, read_records, write_outputs};

#[derive(Parser, Debug)]
pub struct Args {
    /// The manifest the sweep was run from (defines the cell grid).
    #[arg(long)]
    manifest: PathBuf,
    /// Directory holding runs/cell_*.jsonl records.
    #[arg(long)]
    out_dir: PathBuf,
}

/// Recomputes report.csv and contour.csv from per-run records. Timing is
/// not recoverable from records, so wall_s is 0 in recomputed reports.
pub fn run(args: Args) -> CommandResult {
    let manifest = BenchManifest::load(&args.manifest)
        .with_context(|| format!("loading manifest {}", args.manifest.display()))?;
    let runs_dir = args.out_dir.join("runs");
    let mut rows: Vec<ReportRow> = Vec::new();
    for cell in cells_for(&manifest)? {
        let path = cell_file(&runs_dir, cell.id);
        let records = read_records(&path)?;
        rows.push(aggregate_cell(&cell, &records, 0.0));
    }
    write_outputs(&args.out_dir, &rows)?;
    Ok(())
}
