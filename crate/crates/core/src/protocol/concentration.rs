//! Fixed-parameter table generation by parameter concentration.
//!
//! Optimized QAOA parameters vary little across instances of one family,
//! so averaging exactly optimized parameters over a batch of random
//! instances yields a high-quality instance-independent initial point.
//! This is how the shipped table (`data/fixed_params.json`) was produced;
//! regenerate it with `cargo run --release --example gen_fixed_params`.

use rayon::prelude::*;

use crate::dfo::{minimize_nelder_mead, BudgetPlan, FnOracle};
use crate::error::Result;
use crate::problems::{
    generate_maxcut_instance, generate_po_instance, rescale_instance, MaxCutInstance,
    ProblemInstance,
};
use crate::seeding::derive_seed;
use crate::simulator::{MixerKind, PreparedQaoa, QaoaParams};

use super::ProblemFamily;

/// Desk-scale instance sizes the averages are taken over.
const MAXCUT_N: usize = 12;
const PO_N: usize = 10;

fn family_instance(family: ProblemFamily, seed: u64) -> Result<ProblemInstance> {
    match family {
        ProblemFamily::MaxCut3Regular => {
            // Fixed parameters target the unweighted family; rescaling maps
            // weighted instances onto it.
            let weighted = generate_maxcut_instance(MAXCUT_N, seed)?;
            let edges = weighted.edges.iter().map(|&(u, v, _)| (u, v, 1.0)).collect();
            Ok(ProblemInstance::MaxCut(MaxCutInstance::new(MAXCUT_N, edges)?))
        }
        ProblemFamily::SkModelPo => {
            let inst = ProblemInstance::Portfolio(generate_po_instance(PO_N, seed)?);
            Ok(rescale_instance(&inst)?.0)
        }
    }
}

fn exact_objective(prepared: &PreparedQaoa, sign: f64, point: &[f64]) -> f64 {
    let params = QaoaParams::from_point(point).expect("search points are valid parameters");
    let (mean, _) = prepared
        .energy_moments(&params)
        .expect("prepared problem matches parameter dimension");
    sign * mean
}

/// Coarse p=1 grid search over a generous positive-branch box.
fn grid_search_p1(prepared: &PreparedQaoa, sign: f64, family: ProblemFamily) -> Vec<f64> {
    let ((gamma_hi, beta_hi), (res_g, res_b)) = match family {
        ProblemFamily::MaxCut3Regular => ((1.4, 0.8), (57, 33)),
        ProblemFamily::SkModelPo => ((2.0, 3.1), (81, 63)),
    };
    let mut best = (f64::INFINITY, vec![0.0, 0.0]);
    for ig in 0..res_g {
        let gamma = gamma_hi * ig as f64 / (res_g - 1) as f64;
        for ib in 0..res_b {
            let beta = beta_hi * ib as f64 / (res_b - 1) as f64;
            let value = exact_objective(prepared, sign, &[gamma, beta]);
            if value < best.0 {
                best = (value, vec![gamma, beta]);
            }
        }
    }
    best.1
}

/// Local polish with Nelder–Mead on the exact objective.
fn polish(prepared: &PreparedQaoa, sign: f64, start: &[f64], evals: usize) -> Vec<f64> {
    let dim = start.len();
    let oracle = FnOracle::new(dim, |point: &[f64]| exact_objective(prepared, sign, point));
    let plan = BudgetPlan {
        total_shots: evals as u64,
        initial_evals: dim + 1,
        extra_evals: evals.saturating_sub(dim + 1),
        shots_per_eval: 1,
    };
    minimize_nelder_mead(&oracle, start, 0.05, &plan, 0)
        .map(|trace| trace.best_point().to_vec())
        .unwrap_or_else(|_| start.to_vec())
}

/// Linear resampling of a p-length schedule to `new_len` points.
fn interp_schedule(values: &[f64], new_len: usize) -> Vec<f64> {
    if values.len() == 1 {
        return vec![values[0]; new_len];
    }
    (0..new_len)
        .map(|i| {
            let t = i as f64 / (new_len - 1) as f64 * (values.len() - 1) as f64;
            let lo = (t.floor() as usize).min(values.len() - 2);
            let frac = t - lo as f64;
            values[lo] * (1.0 - frac) + values[lo + 1] * frac
        })
        .collect()
}

fn mean_point(points: &[Vec<f64>]) -> Vec<f64> {
    let dim = points[0].len();
    let mut mean = vec![0.0; dim];
    for point in points {
        for (m, x) in mean.iter_mut().zip(point) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= points.len() as f64;
    }
    mean
}

/// Builds table entries for `p = 1..=max_p` by averaging exactly optimized
/// parameters over `instances` random desk-scale instances per depth.
/// Depths build on each other: each instance at depth `p+1` starts from the
/// linear resampling of the depth-p average, which keeps all optima in one
/// symmetry branch.
pub fn generate_concentration_table(
    family: ProblemFamily,
    max_p: usize,
    instances: usize,
    seed: u64,
) -> Result<Vec<(usize, QaoaParams)>> {
    let sign = match family {
        ProblemFamily::MaxCut3Regular => -1.0,
        ProblemFamily::SkModelPo => 1.0,
    };
    let mixer = match family {
        ProblemFamily::MaxCut3Regular => MixerKind::TransverseX,
        ProblemFamily::SkModelPo => MixerKind::XyRing { trotter_reps: 1 },
    };
    let prepared: Vec<PreparedQaoa> = (0..instances)
        .map(|i| {
            let inst = family_instance(family, derive_seed(seed, &[i as u64]))?;
            PreparedQaoa::new(&inst, mixer)
        })
        .collect::<Result<_>>()?;

    let mut table = Vec::with_capacity(max_p);
    let mut previous_average: Option<Vec<f64>> = None;
    for p in 1..=max_p {
        let optima: Vec<Vec<f64>> = prepared
            .par_iter()
            .map(|prep| {
                let start = match &previous_average {
                    None => grid_search_p1(prep, sign, family),
                    Some(avg) => {
                        let prev = QaoaParams::from_point(avg).expect("average is valid");
                        let mut start = interp_schedule(&prev.gamma, p);
                        start.extend(interp_schedule(&prev.beta, p));
                        start
                    }
                };
                polish(prep, sign, &start, 300 * p)
            })
            .collect();
        let average = mean_point(&optima);
        table.push((p, QaoaParams::from_point(&average)?));
        previous_average = Some(average);
    }
    Ok(table)
}
