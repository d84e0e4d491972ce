//! Reproducible benchmark sweeps over protocol configurations.
//!
//! A manifest pins the instance set, the configuration grid, repetition
//! count, and a master seed. Cells are the Cartesian product of the grids
//! in a canonical order; per-run seeds derive from
//! `(master_seed, cell id, instance index, repetition)`, so any slice of a
//! sweep can be reproduced in isolation.

use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dfo::{allocate_budget, ModelKind};
use crate::error::{Error, Result};
use crate::landscape::LandscapeGrid;
use crate::metrics::expected_ar;
use crate::problems::{rescale_instance, ProblemInstance, ProblemKind};
use crate::protocol::{
    build_protocol_landscape, initial_parameters, optimize_reference,
    run_protocol_with_reference, Backend, FixedParameterTable, OptimizerKind, ProblemFamily,
    ProtocolConfig, Reference,
};
use crate::seeding::derive_seed;
use crate::simulator::{MixerKind, PreparedQaoa};
use crate::metrics::ArContext;

/// Objective backend requested by a manifest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendSpec {
    Exact,
    Sampled,
    Landscape { resolution: usize },
}

/// Sweep specification; see the module docs for seeding semantics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchManifest {
    /// Instance file paths, relative to the manifest's directory.
    pub instances: Vec<String>,
    pub p_values: Vec<usize>,
    pub optimizers: Vec<OptimizerKind>,
    pub rhobegs: Vec<f64>,
    pub extra_evals: Vec<usize>,
    pub total_shots: Vec<u64>,
    pub repetitions: usize,
    pub master_seed: u64,
    pub backend: BackendSpec,
}

impl BenchManifest {
    /// Parses and validates manifest JSON; schema errors carry the field path.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let manifest: BenchManifest = serde_path_to_error::deserialize(&mut de)
            .map_err(|e| Error::Schema(format!("manifest field `{}`: {}", e.path(), e.inner())))?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let non_empty: [(&str, bool); 6] = [
            ("instances", self.instances.is_empty()),
            ("p_values", self.p_values.is_empty()),
            ("optimizers", self.optimizers.is_empty()),
            ("rhobegs", self.rhobegs.is_empty()),
            ("extra_evals", self.extra_evals.is_empty()),
            ("total_shots", self.total_shots.is_empty()),
        ];
        for (field, empty) in non_empty {
            if empty {
                return Err(Error::Schema(format!("manifest field `{field}` is empty")));
            }
        }
        if self.repetitions == 0 {
            return Err(Error::Schema("manifest field `repetitions` must be >= 1".into()));
        }
        if self.p_values.iter().any(|&p| p == 0) {
            return Err(Error::Schema("manifest field `p_values` entries must be >= 1".into()));
        }
        if self.rhobegs.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Schema("manifest field `rhobegs` entries must be positive".into()));
        }
        if self.total_shots.iter().any(|&s| s == 0) {
            return Err(Error::Schema("manifest field `total_shots` entries must be >= 1".into()));
        }
        if let BackendSpec::Landscape { resolution } = self.backend {
            if resolution < 2 {
                return Err(Error::Schema(
                    "manifest field `backend.resolution` must be >= 2".into(),
                ));
            }
        }
        Ok(())
    }

    /// Cartesian cell grid in canonical order (p, optimizer, rhobeg,
    /// extra_evals, total_shots). Fails on budget-infeasible cells.
    pub fn expand_cells(&self) -> Result<Vec<CellConfig>> {
        let mut cells = Vec::new();
        for &p in &self.p_values {
            for &optimizer in &self.optimizers {
                for &rhobeg in &self.rhobegs {
                    for &extra_evals in &self.extra_evals {
                        for &total_shots in &self.total_shots {
                            let plan =
                                allocate_budget(total_shots, p, extra_evals, ModelKind::Linear)?;
                            cells.push(CellConfig {
                                id: cells.len() as u64,
                                p,
                                optimizer,
                                rhobeg,
                                extra_evals,
                                total_shots,
                                shots_per_eval: plan.shots_per_eval,
                            });
                        }
                    }
                }
            }
        }
        Ok(cells)
    }
}

/// One point of the configuration grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellConfig {
    pub id: u64,
    pub p: usize,
    pub optimizer: OptimizerKind,
    pub rhobeg: f64,
    pub extra_evals: usize,
    pub total_shots: u64,
    pub shots_per_eval: u64,
}

/// Outcome of one protocol run (or a degenerate-instance skip).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub cell_id: u64,
    pub instance_index: usize,
    pub instance: String,
    pub rep: usize,
    pub seed: u64,
    pub ar_ini: f64,
    pub ar_opt: f64,
    pub ar_final: Option<f64>,
    /// `None` marks a degenerate-instance skip (`ar_opt ≈ ar_ini`).
    pub relative_improvement: Option<f64>,
    pub shots_used: u64,
    pub evals: usize,
}

/// Aggregated view of one cell; the aggregation statistic is over
/// instances (per-instance means over repetitions first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub cell_id: u64,
    pub p: usize,
    pub optimizer: OptimizerKind,
    pub rhobeg: f64,
    pub extra_evals: usize,
    pub total_shots: u64,
    pub shots_per_eval: u64,
    pub instance_count: usize,
    pub skipped: usize,
    pub mean_improvement: f64,
    pub stderr: f64,
    pub mean_shots_used: f64,
    pub wall_s: f64,
}

/// Shared per-sweep state: loaded instances, exact references for every
/// `(instance, p)`, and landscape grids when the backend needs them.
/// References are computed once and shared by every cell and repetition.
pub struct SweepContext {
    manifest: BenchManifest,
    instances: Vec<ProblemInstance>,
    names: Vec<String>,
    table: FixedParameterTable,
    references: HashMap<(usize, usize), Reference>,
    initial_ars: HashMap<(usize, usize), f64>,
    grids: HashMap<(usize, usize), Arc<LandscapeGrid>>,
}

impl SweepContext {
    /// Builds the context: computes the noiseless reference (and, for the
    /// landscape backend, the grid) for every `(instance, p)` pair in
    /// parallel.
    pub fn prepare(
        manifest: BenchManifest,
        instances: Vec<ProblemInstance>,
        names: Vec<String>,
        table: FixedParameterTable,
    ) -> Result<Self> {
        if instances.len() != manifest.instances.len() || names.len() != instances.len() {
            return Err(Error::InvalidArgument(
                "instances/names must match the manifest list".into(),
            ));
        }
        let pairs: Vec<(usize, usize)> = (0..instances.len())
            .flat_map(|i| manifest.p_values.iter().map(move |&p| (i, p)))
            .collect();
        let prepared: Vec<((usize, usize), Reference, f64, Option<Arc<LandscapeGrid>>)> = pairs
            .par_iter()
            .map(|&(index, p)| {
                let inst = &instances[index];
                let reference = optimize_reference(inst, p, &table)?;
                let (rescaled, _) = rescale_instance(inst)?;
                let prepared = PreparedQaoa::new(&rescaled, MixerKind::default_for(inst.kind()))?;
                let initial =
                    initial_parameters(ProblemFamily::of(inst.kind()), p, &table)?;
                let ctx = match inst.kind() {
                    ProblemKind::MaxCut => ArContext::for_maxcut(prepared.hamiltonian())?,
                    ProblemKind::Portfolio => ArContext::for_portfolio(
                        prepared.hamiltonian(),
                        rescaled.budget_k().expect("portfolio carries K"),
                    )?,
                };
                let ar_ini = expected_ar(&prepared.state(&initial)?, &ctx)?;
                let grid = match manifest.backend {
                    BackendSpec::Landscape { resolution } => Some(Arc::new(
                        build_protocol_landscape(inst, p, &table, resolution)?,
                    )),
                    _ => None,
                };
                Ok(((index, p), reference, ar_ini, grid))
            })
            .collect::<Result<_>>()?;
        let mut references = HashMap::new();
        let mut initial_ars = HashMap::new();
        let mut grids = HashMap::new();
        for (key, reference, ar_ini, grid) in prepared {
            references.insert(key, reference);
            initial_ars.insert(key, ar_ini);
            if let Some(grid) = grid {
                grids.insert(key, grid);
            }
        }
        Ok(Self {
            manifest,
            instances,
            names,
            table,
            references,
            initial_ars,
            grids,
        })
    }

    pub fn manifest(&self) -> &BenchManifest {
        &self.manifest
    }

    fn backend_for(&self, key: (usize, usize)) -> Backend {
        match self.manifest.backend {
            BackendSpec::Exact => Backend::ExactSim,
            BackendSpec::Sampled => Backend::SampledSim,
            BackendSpec::Landscape { .. } => {
                Backend::LandscapeOracle(self.grids[&key].clone())
            }
        }
    }

    /// Runs every (instance, repetition) of one cell, in parallel, in
    /// canonical output order. Degenerate instances are skipped without
    /// spending shots.
    pub fn run_cell(&self, cell: &CellConfig) -> Result<Vec<RunRecord>> {
        let reps = self.manifest.repetitions;
        let jobs: Vec<(usize, usize)> = (0..self.instances.len())
            .flat_map(|i| (0..reps).map(move |r| (i, r)))
            .collect();
        jobs.par_iter()
            .map(|&(index, rep)| {
                let key = (index, cell.p);
                let reference = &self.references[&key];
                let ar_ini = self.initial_ars[&key];
                let seed = derive_seed(
                    self.manifest.master_seed,
                    &[cell.id, index as u64, rep as u64],
                );
                let base = RunRecord {
                    cell_id: cell.id,
                    instance_index: index,
                    instance: self.names[index].clone(),
                    rep,
                    seed,
                    ar_ini,
                    ar_opt: reference.ar_opt,
                    ar_final: None,
                    relative_improvement: None,
                    shots_used: 0,
                    evals: 0,
                };
                if (reference.ar_opt - ar_ini).abs() < 1e-12 {
                    return Ok(base);
                }
                let config = ProtocolConfig {
                    total_shots: cell.total_shots,
                    extra_evals: cell.extra_evals,
                    rhobeg: Some(cell.rhobeg),
                    optimizer: cell.optimizer,
                    seed,
                };
                let result = run_protocol_with_reference(
                    &self.instances[index],
                    cell.p,
                    &config,
                    &self.table,
                    &self.backend_for(key),
                    Some(reference),
                )?;
                Ok(RunRecord {
                    ar_final: Some(result.ar_final),
                    relative_improvement: Some(result.relative_improvement),
                    shots_used: result.trace.total_shots_spent(),
                    evals: result.trace.evals(),
                    ..base
                })
            })
            .collect()
    }

    /// Runs every cell; returns `(cells, records per cell)`.
    pub fn run_all(&self) -> Result<(Vec<CellConfig>, Vec<Vec<RunRecord>>)> {
        let cells = self.manifest.expand_cells()?;
        let mut per_cell = Vec::with_capacity(cells.len());
        for cell in &cells {
            per_cell.push(self.run_cell(cell)?);
        }
        Ok((cells, per_cell))
    }
}

/// Aggregates one cell's records: per-instance means over repetitions,
/// then mean and standard error over non-skipped instances
/// (`stderr = sample std / sqrt(instance_count − skipped)`).
pub fn aggregate_cell(cell: &CellConfig, records: &[RunRecord], wall_s: f64) -> ReportRow {
    let mut per_instance: HashMap<usize, Vec<f64>> = HashMap::new();
    let mut skipped_instances: std::collections::HashSet<usize> = Default::default();
    let mut shots_sum = 0.0;
    let mut shots_count = 0usize;
    for record in records {
        match record.relative_improvement {
            Some(value) => {
                per_instance.entry(record.instance_index).or_default().push(value);
                shots_sum += record.shots_used as f64;
                shots_count += 1;
            }
            None => {
                skipped_instances.insert(record.instance_index);
            }
        }
    }
    let mut means: Vec<f64> = per_instance
        .iter()
        .map(|(_, values)| values.iter().sum::<f64>() / values.len() as f64)
        .collect();
    means.sort_by(|a, b| a.partial_cmp(b).expect("finite improvements"));
    let count = means.len();
    let mean = if count == 0 {
        f64::NAN
    } else {
        means.iter().sum::<f64>() / count as f64
    };
    let stderr = if count < 2 {
        0.0
    } else {
        let var =
            means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (count - 1) as f64;
        (var / count as f64).sqrt()
    };
    ReportRow {
        cell_id: cell.id,
        p: cell.p,
        optimizer: cell.optimizer,
        rhobeg: cell.rhobeg,
        extra_evals: cell.extra_evals,
        total_shots: cell.total_shots,
        shots_per_eval: cell.shots_per_eval,
        instance_count: count + skipped_instances.len(),
        skipped: skipped_instances.len(),
        mean_improvement: mean,
        stderr,
        mean_shots_used: if shots_count == 0 {
            0.0
        } else {
            shots_sum / shots_count as f64
        },
        wall_s,
    }
}

fn optimizer_label(optimizer: OptimizerKind) -> String {
    match optimizer {
        OptimizerKind::LinearTrustRegion => "linear_trust_region".into(),
        OptimizerKind::NelderMead => "nelder_mead".into(),
        OptimizerKind::Spsa { a, c } => format!("spsa(a={a};c={c})"),
    }
}

/// Writes the per-cell report CSV.
pub fn write_report_csv<W: Write>(rows: &[ReportRow], mut writer: W) -> Result<()> {
    writeln!(
        writer,
        "cell_id,p,optimizer,rhobeg,extra_evals,total_shots,shots_per_eval,\
         instance_count,skipped,mean_improvement,stderr,mean_shots_used,wall_s"
    )?;
    for row in rows {
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.cell_id,
            row.p,
            optimizer_label(row.optimizer),
            row.rhobeg,
            row.extra_evals,
            row.total_shots,
            row.shots_per_eval,
            row.instance_count,
            row.skipped,
            row.mean_improvement,
            row.stderr,
            row.mean_shots_used,
            row.wall_s,
        )?;
    }
    Ok(())
}

/// Writes the contour CSV `(extra_evals, shots_per_eval, mean_improvement)`,
/// the axes of the budget-allocation heat map.
pub fn write_contour_csv<W: Write>(rows: &[ReportRow], mut writer: W) -> Result<()> {
    writeln!(writer, "extra_evals,shots_per_eval,mean_improvement")?;
    for row in rows {
        writeln!(
            writer,
            "{},{},{}",
            row.extra_evals, row.shots_per_eval, row.mean_improvement
        )?;
    }
    Ok(())
}

#[cfg(test)]
#[path = "bench_tests.rs"]
mod tests;
