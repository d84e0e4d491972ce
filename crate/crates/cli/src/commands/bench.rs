use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::Parser;
use shotqaoa::bench::{
    aggregate_cell, write_contour_csv, write_report_csv, BenchManifest, CellConfig, ReportRow,
    RunRecord, SweepContext,
};
use shotqaoa::problems::ProblemInstance;

use crate::CommandResult;

#[derive(Parser, Debug)]
pub struct Args {
    /// Sweep manifest (JSON); instance paths resolve relative to it.
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory (per-run records under runs/, report and contour
    /// CSVs at the top level).
    #[arg(long)]
    out_dir: PathBuf,
    /// Fixed-parameter table override.
    #[arg(long)]
    table: Option<PathBuf>,
}

pub fn cell_file(runs_dir: &Path, cell: u64) -> PathBuf {
    runs_dir.join(format!("cell_{cell:05}.jsonl"))
}

pub fn read_records(path: &Path) -> anyhow::Result<Vec<RunRecord>> {
    let file = File::open(path).with_context(|| format!("reading {}", path.display()))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RunRecord = serde_json::from_str(&line)
            .with_context(|| format!("{}: record on line {}", path.display(), i + 1))?;
        records.push(record);
    }
    Ok(records)
}

fn write_records(path: &Path, records: &[RunRecord]) -> anyhow::Result<()> {
    let mut out = BufWriter::new(
        File::create(path).with_context(|| format!("writing {}", path.display()))?,
    );
    for record in records {
        writeln!(out, "{}", serde_json::to_string(record)?)?;
    }
    Ok(())
}

pub fn load_manifest_instances(
    manifest_path: &Path,
    manifest: &BenchManifest,
) -> anyhow::Result<(Vec<ProblemInstance>, Vec<String>)> {
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut instances = Vec::with_capacity(manifest.instances.len());
    for name in &manifest.instances {
        instances.push(super::load_instance(&base.join(name))?);
    }
    Ok((instances, manifest.instances.clone()))
}

pub fn run(args: Args) -> CommandResult {
    let manifest = BenchManifest::load(&args.manifest)
        .with_context(|| format!("loading manifest {}", args.manifest.display()))?;
    let (instances, names) = load_manifest_instances(&args.manifest, &manifest)?;
    let table = super::load_table(args.table.as_deref())?;
    let runs_dir = args.out_dir.join("runs");
    fs::create_dir_all(&runs_dir)
        .with_context(|| format!("creating {}", runs_dir.display()))?;

    let cells = manifest.expand_cells()?;
    let expected_records = manifest.instances.len() * manifest.repetitions;
    let context = SweepContext::prepare(manifest, instances, names, table)?;

    let mut rows: Vec<ReportRow> = Vec::with_capacity(cells.len());
    for cell in &cells {
        let path = cell_file(&runs_dir, cell.id);
        let (records, wall_s) = match resumable_records(&path, expected_records)? {
            Some(records) => (records, 0.0),
            None => {
                let started = Instant::now();
                let records = context.run_cell(cell)?;
                let wall_s = started.elapsed().as_secs_f64();
                write_records(&path, &records)?;
                (records, wall_s)
            }
        };
        rows.push(aggregate_cell(cell, &records, wall_s));
    }

    write_outputs(&args.out_dir, &rows)?;
    Ok(())
}

/// A cell file with the full record count is reused; partial files are
/// recomputed from scratch.
fn resumable_records(path: &Path, expected: usize) -> anyhow::Result<Option<Vec<RunRecord>>> {
    if !path.exists() {
        return Ok(None);
    }
    let records = read_records(path)?;
    if records.len() == expected {
        Ok(Some(records))
    } else {
        Ok(None)
    }
}

pub fn write_outputs(out_dir: &Path, rows: &[ReportRow]) -> anyhow::Result<()> {
    let report_path = out_dir.join("report.csv");
    let report = File::create(&report_path)
        .with_context(|| format!("writing {}", report_path.display()))?;
    write_report_csv(rows, BufWriter::new(report))?;
    let contour_path = out_dir.join("contour.csv");
    let contour = File::create(&contour_path)
        .with_context(|| format!("writing {}", contour_path.display()))?;
    write_contour_csv(rows, BufWriter::new(contour))?;
    Ok(())
}

pub fn cells_for(manifest: &BenchManifest) -> anyhow::Result<Vec<CellConfig>> {
    Ok(manifest.expand_cells()?)
}
