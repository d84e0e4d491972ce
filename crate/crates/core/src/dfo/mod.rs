//! Derivative-free optimizers over a shot-metered objective oracle.
//!
//! All optimizers spend a fixed number of shots per evaluation from a
//! [`BudgetPlan`], record every evaluation in an [`OptimizationTrace`], and
//! return the best-seen point by sampled value (ties to the earliest
//! evaluation). Given identical oracle, start, hyperparameters, and seed,
//! traces are bit-identical.

mod linear_tr;
mod nelder_mead;
mod spsa;

pub use linear_tr::minimize_linear_trust_region;
pub use nelder_mead::minimize_nelder_mead;
pub use spsa::minimize_spsa;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::derive_seed;

/// A sampled objective: deterministic given `(point, shots, seed)`.
pub trait ObjectiveOracle: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, point: &[f64], shots: u64, seed: u64) -> f64;
}

/// Noiseless closure oracle; ignores shots and seed.
pub struct FnOracle<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnOracle<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> ObjectiveOracle for FnOracle<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, point: &[f64], _shots: u64, _seed: u64) -> f64 {
        (self.f)(point)
    }
}

/// Internal model assumed by the optimizer, which sets how many initial
/// evaluations it needs for `2p` parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    /// `2p + 1` initial evaluations.
    Linear,
    /// `(2p+1)(2p+2)/2` initial evaluations.
    Quadratic,
}

/// Equal-allocation plan: `shots_per_eval = floor(total / evals)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetPlan {
    pub total_shots: u64,
    pub initial_evals: usize,
    pub extra_evals: usize,
    pub shots_per_eval: u64,
}

impl BudgetPlan {
    pub fn max_evals(&self) -> usize {
        self.initial_evals + self.extra_evals
    }
}

/// Splits a total shot budget equally over the evaluations a `p`-layer
/// optimization needs: the model-determined initial evaluations plus
/// `extra_evals` fine-tuning steps.
pub fn allocate_budget(
    total_shots: u64,
    p: usize,
    extra_evals: usize,
    model: ModelKind,
) -> Result<BudgetPlan> {
    if p == 0 {
        return Err(Error::InvalidArgument("allocate_budget needs p >= 1".into()));
    }
    let d = 2 * p;
    let initial_evals = match model {
        ModelKind::Linear => d + 1,
        ModelKind::Quadratic => (d + 1) * (d + 2) / 2,
    };
    let evals = initial_evals + extra_evals;
    let shots_per_eval = total_shots / evals as u64;
    if shots_per_eval == 0 {
        return Err(Error::InfeasibleBudget {
            total_shots,
            evals,
        });
    }
    Ok(BudgetPlan {
        total_shots,
        initial_evals,
        extra_evals,
        shots_per_eval,
    })
}

/// One oracle evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub point: Vec<f64>,
    pub value: f64,
    pub shots: u64,
    pub cumulative_shots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationReason {
    EvalsExhausted,
    BudgetExhausted,
    RhoConverged,
    IterationsExhausted,
}

/// Ordered record of an optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub records: Vec<TraceRecord>,
    pub best_index: usize,
    pub termination: TerminationReason,
}

impl OptimizationTrace {
    pub fn best_point(&self) -> &[f64] {
        &self.records[self.best_index].point
    }

    pub fn best_value(&self) -> f64 {
        self.records[self.best_index].value
    }

    pub fn total_shots_spent(&self) -> u64 {
        self.records.last().map_or(0, |r| r.cumulative_shots)
    }

    pub fn evals(&self) -> usize {
        self.records.len()
    }
}

/// Shared evaluation bookkeeping: meters shots, derives per-evaluation
/// seeds, and tracks the best-seen record.
pub(crate) struct Meter<'a> {
    oracle: &'a dyn ObjectiveOracle,
    plan: &'a BudgetPlan,
    seed: u64,
    records: Vec<TraceRecord>,
    best_index: usize,
    cumulative: u64,
}

impl<'a> Meter<'a> {
    pub(crate) fn new(oracle: &'a dyn ObjectiveOracle, plan: &'a BudgetPlan, seed: u64) -> Self {
        Self {
            oracle,
            plan,
            seed,
            records: Vec::with_capacity(plan.max_evals()),
            best_index: 0,
            cumulative: 0,
        }
    }

    /// True while another evaluation fits in both the eval and shot budgets.
    pub(crate) fn can_eval(&self) -> bool {
        self.records.len() < self.plan.max_evals()
            && self.cumulative + self.plan.shots_per_eval <= self.plan.total_shots
    }

    /// Whether stopping now is due to the eval cap or the shot budget.
    pub(crate) fn exhausted_reason(&self) -> TerminationReason {
        if self.records.len() >= self.plan.max_evals() {
            TerminationReason::EvalsExhausted
        } else {
            TerminationReason::BudgetExhausted
        }
    }

    pub(crate) fn eval(&mut self, point: &[f64]) -> f64 {
        debug_assert!(self.can_eval());
        let index = self.records.len() as u64;
        let eval_seed = derive_seed(self.seed, &[index]);
        let value = self.oracle.eval(point, self.plan.shots_per_eval, eval_seed);
        self.cumulative += self.plan.shots_per_eval;
        if self.records.is_empty() || value < self.records[self.best_index].value {
            self.best_index = self.records.len();
        }
        self.records.push(TraceRecord {
            point: point.to_vec(),
            value,
            shots: self.plan.shots_per_eval,
            cumulative_shots: self.cumulative,
        });
        value
    }

    pub(crate) fn evals_used(&self) -> usize {
        self.records.len()
    }

    pub(crate) fn finish(self, termination: TerminationReason) -> OptimizationTrace {
        OptimizationTrace {
            records: self.records,
            best_index: self.best_index,
            termination,
        }
    }
}

/// Fits the unique affine interpolant `m(x) = c + g·x` through `d+1`
/// points; returns `(c, g)`. Errors if the simplex is degenerate.
pub fn fit_linear_model(points: &[Vec<f64>], values: &[f64]) -> Result<(f64, Vec<f64>)> {
    let d = points
        .first()
        .map(|p| p.len())
        .ok_or(Error::EmptyInput("fit_linear_model needs points"))?;
    if points.len() != d + 1 || values.len() != d + 1 {
        return Err(Error::DimensionMismatch {
            expected: d + 1,
            got: points.len().min(values.len()),
        });
    }
    let mut matrix: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let mut row = Vec::with_capacity(d + 1);
            row.push(1.0);
            row.extend_from_slice(p);
            row
        })
        .collect();
    let mut rhs = values.to_vec();
    solve_dense(&mut matrix, &mut rhs)?;
    let gradient = rhs[1..].to_vec();
    Ok((rhs[0], gradient))
}

/// In-place Gaussian elimination with partial pivoting.
fn solve_dense(matrix: &mut [Vec<f64>], rhs: &mut [f64]) -> Result<()> {
    let n = rhs.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| {
                matrix[a][col]
                    .abs()
                    .partial_cmp(&matrix[b][col].abs())
                    .expect("finite pivots")
            })
            .expect("non-empty range");
        let pivot = matrix[pivot_row][col];
        if pivot.abs() < 1e-14 || !pivot.is_finite() {
            return Err(Error::DegenerateSimplex);
        }
        matrix.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in (col + 1)..n {
            let factor = matrix[row][col] / matrix[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                matrix[row][k] -= factor * matrix[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    for col in (0..n).rev() {
        let mut value = rhs[col];
        for k in (col + 1)..n {
            value -= matrix[col][k] * rhs[k];
        }
        rhs[col] = value / matrix[col][col];
    }
    Ok(())
}

#[cfg(test)]
#[path = "tests.rs"]
mod tests;
