//! Simultaneous perturbation stochastic approximation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seeding::derive_seed;

use super::{BudgetPlan, Meter, ObjectiveOracle, OptimizationTrace, TerminationReason};

/// SPSA with the standard gain schedules `a_k = a/(k+1+A)^0.602` and
/// `c_k = c/(k+1)^0.101`, `A = 0.1·iterations`. Each iteration spends two
/// evaluations at `x ± c_k·Δ` with a Rademacher ±1 perturbation `Δ`; the
/// run stops early once another pair no longer fits the budget.
pub fn minimize_spsa(
    oracle: &dyn ObjectiveOracle,
    x0: &[f64],
    a: f64,
    c: f64,
    iterations: usize,
    plan: &BudgetPlan,
    seed: u64,
) -> Result<OptimizationTrace> {
    let d = oracle.dim();
    if x0.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x0.len(),
        });
    }
    if !(a > 0.0) || !(c > 0.0) {
        return Err(Error::InvalidArgument("spsa gains a and c must be positive".into()));
    }
    if plan.max_evals() < 2 {
        return Err(Error::InfeasibleBudget {
            total_shots: plan.total_shots,
            evals: plan.max_evals(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0x5b5a]));
    let mut meter = Meter::new(oracle, plan, seed);
    let stability = 0.1 * iterations as f64;
    let mut x = x0.to_vec();
    let mut termination = TerminationReason::IterationsExhausted;
    for k in 0..iterations {
        // A full iteration needs both sides of the difference quotient.
        let mut probe = meter.evals_used();
        let mut fits = true;
        for _ in 0..2 {
            if probe >= plan.max_evals()
                || (probe as u64 + 1) * plan.shots_per_eval > plan.total_shots
            {
                fits = false;
                break;
            }
            probe += 1;
        }
        if !fits {
            termination = meter.exhausted_reason();
            break;
        }
        let a_k = a / (k as f64 + 1.0 + stability).powf(0.602);
        let c_k = c / (k as f64 + 1.0).powf(0.101);
        let delta: Vec<f64> = (0..d)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let plus: Vec<f64> = x.iter().zip(&delta).map(|(xi, di)| xi + c_k * di).collect();
        let minus: Vec<f64> = x.iter().zip(&delta).map(|(xi, di)| xi - c_k * di).collect();
        let f_plus = meter.eval(&plus);
        let f_minus = meter.eval(&minus);
        let scale = (f_plus - f_minus) / (2.0 * c_k);
        for (xi, di) in x.iter_mut().zip(&delta) {
            *xi -= a_k * scale / di;
        }
    }
    Ok(meter.finish(termination))
}
