use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use super::*;

fn plan_for(dim: usize, extra: usize, total: u64) -> BudgetPlan {
    allocate_budget(total, dim / 2, extra, ModelKind::Linear).unwrap()
}

#[test]
fn budget_allocation_matches_hand_arithmetic() {
    let plan = allocate_budget(10_000, 5, 2, ModelKind::Linear).unwrap();
    assert_eq!(plan.initial_evals, 11);
    assert_eq!(plan.max_evals(), 13);
    assert_eq!(plan.shots_per_eval, 769);

    let plan = allocate_budget(10_000, 1, 2, ModelKind::Linear).unwrap();
    assert_eq!(plan.max_evals(), 5);
    assert_eq!(plan.shots_per_eval, 2000);

    let plan = allocate_budget(10_000, 5, 2, ModelKind::Quadratic).unwrap();
    assert_eq!(plan.initial_evals, 66);
    assert_eq!(plan.max_evals(), 68);
    assert_eq!(plan.shots_per_eval, 147);
}

#[test]
fn budget_allocation_rejects_zero_shot_evals() {
    assert!(matches!(
        allocate_budget(10, 5, 2, ModelKind::Linear),
        Err(Error::InfeasibleBudget { .. })
    ));
    assert!(allocate_budget(13, 5, 2, ModelKind::Linear).is_ok());
}

#[test]
fn linear_fit_recovers_exact_gradient() {
    // Criterion: after the d+1 phase-1 evaluations of a noiseless linear
    // objective, the fitted gradient is exact.
    let coeffs = [1.5, -2.25];
    let objective = |x: &[f64]| coeffs[0] * x[0] + coeffs[1] * x[1] + 0.7;
    let x0 = vec![0.3, -0.1];
    let rhobeg = 0.4;
    let mut points = vec![x0.clone()];
    for i in 0..2 {
        let mut v = x0.clone();
        v[i] += rhobeg;
        points.push(v);
    }
    let values: Vec<f64> = points.iter().map(|p| objective(p)).collect();
    let (intercept, gradient) = fit_linear_model(&points, &values).unwrap();
    assert_abs_diff_eq!(gradient[0], coeffs[0], epsilon = 1e-10);
    assert_abs_diff_eq!(gradient[1], coeffs[1], epsilon = 1e-10);
    assert_abs_diff_eq!(intercept, 0.7, epsilon = 1e-10);
}

#[test]
fn linear_fit_rejects_degenerate_simplex() {
    let points = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
    let values = vec![0.0, 1.0, 2.0];
    assert!(matches!(
        fit_linear_model(&points, &values),
        Err(Error::DegenerateSimplex)
    ));
}

#[test]
fn trust_region_descends_on_convex_bowl() {
    let oracle = FnOracle::new(2, |x: &[f64]| x.iter().map(|v| v * v).sum());
    let plan = plan_for(2, 47, 1_000_000);
    let trace =
        minimize_linear_trust_region(&oracle, &[1.0, 1.0], 0.5, 1e-6, &plan, 7).unwrap();
    assert!(trace.best_value() < 2.0, "best {}", trace.best_value());
    assert_eq!(trace.records[0].value, 2.0);
}

#[test]
fn trust_region_steps_decrease_linear_model_by_rho_grad_norm() {
    // On a noiseless linear objective the fitted model is exact, so each
    // phase-2 candidate sits exactly rho*|g| below the best vertex value.
    // After d such steps the simplex has collapsed onto the step ray and
    // the perturb-and-retry rescue kicks in, so only the first d steps are
    // asserted against the true gradient.
    let gradient = [2.0, -1.0];
    let oracle = FnOracle::new(2, move |x: &[f64]| gradient[0] * x[0] + gradient[1] * x[1]);
    let plan = plan_for(2, 10, u64::MAX / 2);
    let rhobeg = 0.3;
    let trace =
        minimize_linear_trust_region(&oracle, &[0.0, 0.0], rhobeg, 1e-12, &plan, 3).unwrap();
    let norm = (5.0f64).sqrt();
    let mut best_so_far = trace.records[..3].iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    for record in &trace.records[3..5] {
        assert_abs_diff_eq!(record.value, best_so_far - rhobeg * norm, epsilon = 1e-9);
        best_so_far = best_so_far.min(record.value);
    }
    assert_eq!(trace.termination, TerminationReason::EvalsExhausted);
}

#[test]
fn trust_region_respects_eval_and_shot_budgets() {
    let oracle = FnOracle::new(2, |x: &[f64]| x[0] + x[1]);
    let plan = allocate_budget(100, 1, 4, ModelKind::Linear).unwrap();
    let trace = minimize_linear_trust_region(&oracle, &[0.0, 0.0], 0.1, 1e-9, &plan, 0).unwrap();
    assert_eq!(trace.evals(), 7);
    assert!(trace.total_shots_spent() <= 100);
}

#[test]
fn trust_region_stops_on_rhoend() {
    // Flat-ish objective forces repeated halving down to rhoend.
    let oracle = FnOracle::new(2, |_: &[f64]| 1.0);
    let plan = plan_for(2, 1000, u64::MAX / 2);
    let trace = minimize_linear_trust_region(&oracle, &[0.0, 0.0], 0.5, 1e-3, &plan, 1).unwrap();
    assert_eq!(trace.termination, TerminationReason::RhoConverged);
    assert!(trace.evals() < 1003);
}

#[test]
fn nelder_mead_converges_on_quadratic() {
    let oracle = FnOracle::new(2, |x: &[f64]| {
        (x[0] - 0.5) * (x[0] - 0.5) + 2.0 * (x[1] + 0.25) * (x[1] + 0.25)
    });
    let plan = plan_for(2, 97, 1_000_000);
    let trace = minimize_nelder_mead(&oracle, &[1.5, 1.0], 0.5, &plan, 5).unwrap();
    let best = trace.best_point();
    assert!((best[0] - 0.5).abs() < 1e-2, "x0 = {}", best[0]);
    assert!((best[1] + 0.25).abs() < 1e-2, "x1 = {}", best[1]);
}

#[test]
fn nelder_mead_single_extra_eval_is_one_reflection() {
    let oracle = FnOracle::new(2, |x: &[f64]| x[0] * x[0] + x[1] * x[1]);
    let plan = plan_for(2, 1, 1_000_000);
    let trace = minimize_nelder_mead(&oracle, &[1.0, 1.0], 0.5, &plan, 5).unwrap();
    assert_eq!(trace.evals(), 4);
}

#[test]
fn nelder_mead_is_deterministic() {
    let oracle = FnOracle::new(3, |x: &[f64]| x.iter().map(|v| (v - 0.2).powi(2)).sum());
    // Odd dimension needs a handmade plan: initial_evals must equal d+1 = 4.
    let plan = BudgetPlan {
        total_shots: 1_000_000,
        initial_evals: 4,
        extra_evals: 30,
        shots_per_eval: 100,
    };
    let a = minimize_nelder_mead(&oracle, &[1.0, -1.0, 0.5], 0.3, &plan, 11).unwrap();
    let b = minimize_nelder_mead(&oracle, &[1.0, -1.0, 0.5], 0.3, &plan, 11).unwrap();
    assert_eq!(a, b);
}

#[test]
fn spsa_pairs_evaluations_and_tracks_iterations() {
    let oracle = FnOracle::new(1, |x: &[f64]| x[0] * x[0]);
    let plan = BudgetPlan {
        total_shots: 1000,
        initial_evals: 3,
        extra_evals: 7,
        shots_per_eval: 100,
    };
    let trace = minimize_spsa(&oracle, &[2.0], 0.2, 0.1, 100, &plan, 3).unwrap();
    // budget of 10 evaluations -> exactly 5 iterations -> 10 records
    assert_eq!(trace.evals(), 10);
}

#[test]
fn spsa_gradient_estimate_decreases_quadratic() {
    // For f(x) = x^2 the difference quotient is exactly 2x for any
    // Rademacher delta, so iterates contract toward zero.
    let oracle = FnOracle::new(1, |x: &[f64]| x[0] * x[0]);
    let plan = BudgetPlan {
        total_shots: u64::MAX / 2,
        initial_evals: 3,
        extra_evals: 97,
        shots_per_eval: 1,
    };
    let trace = minimize_spsa(&oracle, &[2.0], 0.2, 0.1, 50, &plan, 9).unwrap();
    assert!(trace.best_value() < oracle.eval(&[2.0], 1, 0));
    // Probe pairs straddle the iterate: their midpoint value decreases.
    let mid_first = (trace.records[0].point[0] + trace.records[1].point[0]) / 2.0;
    let last = trace.records.len() - 2;
    let mid_last = (trace.records[last].point[0] + trace.records[last + 1].point[0]) / 2.0;
    assert!(mid_last.abs() < mid_first.abs());
}

#[test]
fn spsa_is_reproducible() {
    let oracle = FnOracle::new(4, |x: &[f64]| x.iter().map(|v| v * v).sum());
    let plan = BudgetPlan {
        total_shots: 10_000,
        initial_evals: 9,
        extra_evals: 11,
        shots_per_eval: 500,
    };
    let a = minimize_spsa(&oracle, &[1.0; 4], 0.2, 0.1, 10, &plan, 21).unwrap();
    let b = minimize_spsa(&oracle, &[1.0; 4], 0.2, 0.1, 10, &plan, 21).unwrap();
    assert_eq!(a, b);
    let c = minimize_spsa(&oracle, &[1.0; 4], 0.2, 0.1, 10, &plan, 22).unwrap();
    assert_ne!(a.records, c.records);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shot_accounting_holds(extra in 0usize..20, seed in 0u64..100) {
        let oracle = FnOracle::new(2, |x: &[f64]| (x[0] - 0.3).powi(2) + x[1].abs());
        let plan = allocate_budget(5000, 1, extra, ModelKind::Linear).unwrap();
        let trace =
            minimize_linear_trust_region(&oracle, &[0.0, 0.0], 0.2, 1e-8, &plan, seed).unwrap();
        prop_assert!(trace.total_shots_spent() <= plan.total_shots);
        prop_assert!(trace.evals() <= plan.max_evals());
        let best = trace.records.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(best, trace.best_value());
    }

    #[test]
    fn optimizers_ignore_constant_shifts(shift in -50.0f64..50.0, seed in 0u64..50) {
        let base = FnOracle::new(2, |x: &[f64]| (x[0] + 0.4).powi(2) + (x[1] - 0.6).powi(2));
        let shifted = FnOracle::new(2, move |x: &[f64]| {
            (x[0] + 0.4).powi(2) + (x[1] - 0.6).powi(2) + shift
        });
        let plan = allocate_budget(9000, 1, 6, ModelKind::Linear).unwrap();
        let traces = [
            (
                minimize_linear_trust_region(&base, &[1.0, 1.0], 0.3, 1e-8, &plan, seed).unwrap(),
                minimize_linear_trust_region(&shifted, &[1.0, 1.0], 0.3, 1e-8, &plan, seed).unwrap(),
            ),
            (
                minimize_nelder_mead(&base, &[1.0, 1.0], 0.3, &plan, seed).unwrap(),
                minimize_nelder_mead(&shifted, &[1.0, 1.0], 0.3, &plan, seed).unwrap(),
            ),
            (
                minimize_spsa(&base, &[1.0, 1.0], 0.2, 0.1, 3, &plan, seed).unwrap(),
                minimize_spsa(&shifted, &[1.0, 1.0], 0.2, 0.1, 3, &plan, seed).unwrap(),
            ),
        ];
        // Points match to solver round-off (the model fit is a float
        // linear solve), values match up to the shift.
        for (a, b) in &traces {
            prop_assert_eq!(a.records.len(), b.records.len());
            for (ra, rb) in a.records.iter().zip(&b.records) {
                for (xa, xb) in ra.point.iter().zip(&rb.point) {
                    prop_assert!((xa - xb).abs() < 1e-9);
                }
                prop_assert!((ra.value + shift - rb.value).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn trust_region_is_deterministic(seed in 0u64..100) {
        let oracle = FnOracle::new(2, |x: &[f64]| x[0].sin() + x[1] * x[1]);
        let plan = allocate_budget(4000, 1, 5, ModelKind::Linear).unwrap();
        let a = minimize_linear_trust_region(&oracle, &[0.5, -0.5], 0.25, 1e-8, &plan, seed).unwrap();
        let b = minimize_linear_trust_region(&oracle, &[0.5, -0.5], 0.25, 1e-8, &plan, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
