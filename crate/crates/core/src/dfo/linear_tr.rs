//! Linear-model trust-region minimizer.
//!
//! A deliberately small COBYLA-style method: it keeps a `d+1`-point
//! simplex, fits the exact linear interpolant through it, and steps from
//! the best vertex along the negative model gradient with the current
//! trust radius. No constraint handling and no geometry-improvement steps
//! beyond worst-vertex replacement; the simple model keeps the number of
//! initial evaluations at `d+1`, which is what makes it usable when every
//! evaluation costs shots.

use crate::error::{Error, Result};

use super::{fit_linear_model, BudgetPlan, Meter, ObjectiveOracle, OptimizationTrace, TerminationReason};

/// Minimizes through the metered oracle.
///
/// Phase 1 evaluates `x0` and `x0 + rhobeg·e_i`. Phase 2 repeats: fit the
/// linear model on the simplex; step `−ρ·g/‖g‖` from the best vertex;
/// evaluate; replace the worst vertex if the new value beats it; halve `ρ`
/// when the new value fails to beat the best. Stops on eval/shot budget
/// exhaustion or `ρ < rhoend`.
pub fn minimize_linear_trust_region(
    oracle: &dyn ObjectiveOracle,
    x0: &[f64],
    rhobeg: f64,
    rhoend: f64,
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
    if plan.initial_evals != d + 1 {
        return Err(Error::InvalidArgument(format!(
            "plan allocates {} initial evaluations, linear model needs d+1 = {}",
            plan.initial_evals,
            d + 1
        )));
    }
    if !(rhobeg > 0.0) || !(rhoend < rhobeg) {
        return Err(Error::InvalidArgument(
            "need 0 < rhoend < rhobeg".into(),
        ));
    }

    let mut meter = Meter::new(oracle, plan, seed);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut values: Vec<f64> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    for i in 0..d {
        let mut vertex = x0.to_vec();
        vertex[i] += rhobeg;
        simplex.push(vertex);
    }
    for vertex in &simplex {
        if !meter.can_eval() {
            return Err(Error::InfeasibleBudget {
                total_shots: plan.total_shots,
                evals: plan.max_evals(),
            });
        }
        values.push(meter.eval(vertex));
    }

    let mut rho = rhobeg;
    let termination = loop {
        if !meter.can_eval() {
            break meter.exhausted_reason();
        }
        if rho < rhoend {
            break TerminationReason::RhoConverged;
        }
        let gradient = match fit_linear_model(&simplex, &values) {
            Ok((_, g)) => g,
            Err(Error::DegenerateSimplex) => {
                // One rescue attempt: nudge the non-best vertices apart.
                let best = arg_min(&values);
                for (i, vertex) in simplex.iter_mut().enumerate() {
                    if i != best {
                        vertex[(i + 1) % d] += 1e-8 * rhobeg * (i + 1) as f64;
                    }
                }
                match fit_linear_model(&simplex, &values) {
                    Ok((_, g)) => g,
                    Err(e) => return Err(e),
                }
            }
            Err(e) => return Err(e),
        };
        let norm = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < 1e-14 {
            // Flat model: shrink and retry without spending an evaluation.
            rho *= 0.5;
            continue;
        }
        let best = arg_min(&values);
        let best_value = values[best];
        let candidate: Vec<f64> = simplex[best]
            .iter()
            .zip(&gradient)
            .map(|(x, g)| x - rho * g / norm)
            .collect();
        let value = meter.eval(&candidate);
        let worst = arg_max(&values);
        if value < values[worst] {
            simplex[worst] = candidate;
            values[worst] = value;
        }
        if value >= best_value {
            rho *= 0.5;
        }
    };
    Ok(meter.finish(termination))
}

fn arg_min(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

fn arg_max(values: &[f64]) -> usize {
    let mut worst = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[worst] {
            worst = i;
        }
    }
    worst
}
