//! Budget-limited Nelder–Mead simplex method.

use crate::error::{Error, Result};

use super::{BudgetPlan, Meter, ObjectiveOracle, OptimizationTrace};

const REFLECTION: f64 = 1.0;
const EXPANSION: f64 = 2.0;
const CONTRACTION: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Standard Nelder–Mead with the initial simplex `x0, x0 + step·e_i`,
/// cut short as soon as the evaluation or shot budget runs out.
pub fn minimize_nelder_mead(
    oracle: &dyn ObjectiveOracle,
    x0: &[f64],
    initial_step: f64,
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
            "plan allocates {} initial evaluations, simplex needs d+1 = {}",
            plan.initial_evals,
            d + 1
        )));
    }
    if initial_step == 0.0 || !initial_step.is_finite() {
        return Err(Error::InvalidArgument("initial_step must be finite and nonzero".into()));
    }

    let mut meter = Meter::new(oracle, plan, seed);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    for i in 0..d {
        let mut vertex = x0.to_vec();
        vertex[i] += initial_step;
        simplex.push(vertex);
    }
    let mut values = Vec::with_capacity(d + 1);
    for vertex in &simplex {
        if !meter.can_eval() {
            return Err(Error::InfeasibleBudget {
                total_shots: plan.total_shots,
                evals: plan.max_evals(),
            });
        }
        values.push(meter.eval(vertex));
    }

    let termination = 'outer: loop {
        if !meter.can_eval() {
            break meter.exhausted_reason();
        }
        // Stable order: equal values keep their current relative position.
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
        let best = order[0];
        let second_worst = order[d - 1];
        let worst = order[d];

        let mut centroid = vec![0.0; d];
        for &i in &order[..d] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= d as f64;
        }

        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(c, w)| c + REFLECTION * (c - w))
            .collect();
        let f_reflected = meter.eval(&reflected);

        if f_reflected < values[best] {
            if meter.can_eval() {
                let expanded: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[worst])
                    .map(|(c, w)| c + EXPANSION * (c - w))
                    .collect();
                let f_expanded = meter.eval(&expanded);
                if f_expanded < f_reflected {
                    simplex[worst] = expanded;
                    values[worst] = f_expanded;
                } else {
                    simplex[worst] = reflected;
                    values[worst] = f_reflected;
                }
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        if !meter.can_eval() {
            break meter.exhausted_reason();
        }
        // Contract outside toward the reflected point when it at least
        // beats the worst vertex, inside otherwise.
        let (anchor, f_anchor): (&[f64], f64) = if f_reflected < values[worst] {
            (&reflected, f_reflected)
        } else {
            (&simplex[worst], values[worst])
        };
        let contracted: Vec<f64> = centroid
            .iter()
            .zip(anchor)
            .map(|(c, a)| c + CONTRACTION * (a - c))
            .collect();
        let f_contracted = meter.eval(&contracted);
        if f_contracted < f_anchor {
            simplex[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }
        // Shrink everything toward the best vertex.
        for &i in &order[1..] {
            let target: Vec<f64> = simplex[best]
                .iter()
                .zip(&simplex[i])
                .map(|(b, x)| b + SHRINK * (x - b))
                .collect();
            if !meter.can_eval() {
                break 'outer meter.exhausted_reason();
            }
            values[i] = meter.eval(&target);
            simplex[i] = target;
        }
    };
    Ok(meter.finish(termination))
}
