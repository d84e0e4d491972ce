use approx::assert_abs_diff_eq;

use super::*;
use crate::problems::{generate_maxcut_instance, generate_po_instance, MaxCutInstance};

fn maxcut_instance(n: usize, seed: u64) -> ProblemInstance {
    ProblemInstance::MaxCut(generate_maxcut_instance(n, seed).unwrap())
}

#[test]
fn builtin_table_covers_both_families_to_p7() {
    let table = FixedParameterTable::builtin();
    for family in [ProblemFamily::MaxCut3Regular, ProblemFamily::SkModelPo] {
        for p in 1..=7 {
            let params = initial_parameters(family, p, &table).unwrap();
            assert_eq!(params.p(), p);
        }
    }
}

#[test]
fn missing_table_entry_is_reported() {
    let table = FixedParameterTable::builtin();
    let err = initial_parameters(ProblemFamily::MaxCut3Regular, 9, &table).unwrap_err();
    match err {
        Error::MissingTableEntry { family, p } => {
            assert_eq!(family, "maxcut_3_regular");
            assert_eq!(p, 9);
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn param_scaling_uses_max_abs_per_family() {
    let params = QaoaParams::new(vec![0.5, 1.0], vec![0.25, 0.125]).unwrap();
    let scaling = build_param_scaling(&params);
    assert_eq!(scaling.s_gamma, 1.0);
    assert_eq!(scaling.s_beta, 0.25);

    let zero_beta = QaoaParams::new(vec![0.5], vec![0.0]).unwrap();
    assert_eq!(build_param_scaling(&zero_beta).s_beta, 1.0);
}

#[test]
fn param_scaling_round_trips() {
    let params = QaoaParams::new(vec![0.31, -0.7, 0.002], vec![0.9, -0.04, 0.55]).unwrap();
    let scaling = build_param_scaling(&params);
    let back = scaling.unscale(&scaling.scale(&params));
    for (a, b) in params.gamma.iter().zip(&back.gamma) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }
    for (a, b) in params.beta.iter().zip(&back.beta) {
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }
}

#[test]
fn exact_backend_with_many_evals_approaches_reference() {
    let inst = maxcut_instance(8, 41);
    let table = FixedParameterTable::builtin();
    let config = ProtocolConfig {
        extra_evals: 200,
        seed: 3,
        ..ProtocolConfig::default()
    };
    let result = run_protocol(&inst, 1, &config, &table, &Backend::ExactSim).unwrap();
    assert!(
        (result.ar_final - result.ar_opt).abs() < 1e-3,
        "ar_final {} vs ar_opt {}",
        result.ar_final,
        result.ar_opt
    );
    assert!(result.relative_improvement >= 0.0);
}

#[test]
fn sampled_backend_respects_budget() {
    let inst = maxcut_instance(10, 42);
    let table = FixedParameterTable::builtin();
    let config = ProtocolConfig {
        seed: 7,
        ..ProtocolConfig::default()
    };
    let result = run_protocol(&inst, 5, &config, &table, &Backend::SampledSim).unwrap();
    assert!(result.trace.evals() <= 13);
    assert!(result.trace.total_shots_spent() <= 10_000);
    assert_eq!(result.trace.records[0].shots, 769);
    assert_eq!(result.divisor, rescale_instance(&inst).unwrap().1);
}

#[test]
fn po_protocol_samples_stay_in_weight_sector() {
    let inst = ProblemInstance::Portfolio(generate_po_instance(6, 5).unwrap());
    let table = FixedParameterTable::builtin();
    let config = ProtocolConfig {
        seed: 11,
        ..ProtocolConfig::default()
    };
    let result = run_protocol(&inst, 2, &config, &table, &Backend::SampledSim).unwrap();
    // Sample the tuned and initial states directly: every bitstring the
    // trace's objective ever saw comes from such states.
    let (rescaled, _) = rescale_instance(&inst).unwrap();
    let prepared = PreparedQaoa::new(&rescaled, MixerKind::XyRing { trotter_reps: 1 }).unwrap();
    for params in [&result.initial_params, &result.final_params] {
        let sv = prepared.state(params).unwrap();
        let samples = sample_bitstrings(&sv, 2000, 13).unwrap();
        assert!(samples.iter().all(|x| x.count_ones() == 3));
    }
}

#[test]
fn reference_is_exact_for_single_edge() {
    let inst = ProblemInstance::MaxCut(MaxCutInstance::new(2, vec![(0, 1, 1.0)]).unwrap());
    let table = FixedParameterTable::builtin();
    // Oracle: p=1 is exact for one edge; AR 1 is attained at
    // (γ, β) = (π/2, π/8), verified directly.
    let prepared = PreparedQaoa::new(&inst, MixerKind::TransverseX).unwrap();
    let ctx = crate::metrics::ArContext::for_maxcut(prepared.hamiltonian()).unwrap();
    let analytic = QaoaParams::new(
        vec![std::f64::consts::FRAC_PI_2],
        vec![std::f64::consts::FRAC_PI_8],
    )
    .unwrap();
    let ar_analytic = expected_ar(&prepared.state(&analytic).unwrap(), &ctx).unwrap();
    assert_abs_diff_eq!(ar_analytic, 1.0, epsilon = 1e-12);

    let reference = optimize_reference(&inst, 1, &table).unwrap();
    assert!(
        (reference.ar_opt - 1.0).abs() < 1e-6,
        "ar_opt = {}",
        reference.ar_opt
    );
}

#[test]
fn reference_never_reports_below_initial() {
    let table = FixedParameterTable::builtin();
    for seed in 0..5 {
        let inst = maxcut_instance(8, seed);
        let reference = optimize_reference(&inst, 2, &table).unwrap();
        let (rescaled, _) = rescale_instance(&inst).unwrap();
        let prepared = PreparedQaoa::new(&rescaled, MixerKind::TransverseX).unwrap();
        let ctx = crate::metrics::ArContext::for_maxcut(prepared.hamiltonian()).unwrap();
        let initial = initial_parameters(ProblemFamily::MaxCut3Regular, 2, &table).unwrap();
        let ar_ini = expected_ar(&prepared.state(&initial).unwrap(), &ctx).unwrap();
        assert!(reference.ar_opt >= ar_ini);
    }
}

#[test]
fn protocol_is_deterministic() {
    let inst = maxcut_instance(8, 17);
    let table = FixedParameterTable::builtin();
    let config = ProtocolConfig {
        seed: 23,
        ..ProtocolConfig::default()
    };
    let a = run_protocol(&inst, 2, &config, &table, &Backend::SampledSim).unwrap();
    let b = run_protocol(&inst, 2, &config, &table, &Backend::SampledSim).unwrap();
    assert_eq!(a, b);
    let c = run_protocol(
        &inst,
        2,
        &ProtocolConfig {
            seed: 24,
            ..config
        },
        &table,
        &Backend::SampledSim,
    )
    .unwrap();
    assert_ne!(a.trace, c.trace);
}

#[test]
fn protocol_is_transparent_to_pre_rescaling() {
    let inst = maxcut_instance(8, 29);
    let (rescaled, divisor) = rescale_instance(&inst).unwrap();
    assert!(divisor != 1.0);
    let table = FixedParameterTable::builtin();
    let config = ProtocolConfig {
        seed: 5,
        ..ProtocolConfig::default()
    };
    let a = run_protocol(&inst, 2, &config, &table, &Backend::SampledSim).unwrap();
    let b = run_protocol(&rescaled, 2, &config, &table, &Backend::SampledSim).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.ar_final, b.ar_final);
    assert_eq!(b.divisor, 1.0);
}

#[test]
fn relative_improvement_field_is_consistent() {
    let inst = maxcut_instance(8, 31);
    let table = FixedParameterTable::builtin();
    let config = ProtocolConfig {
        seed: 2,
        ..ProtocolConfig::default()
    };
    let result = run_protocol(&inst, 3, &config, &table, &Backend::SampledSim).unwrap();
    let recomputed = (result.ar_final - result.ar_ini) / (result.ar_opt - result.ar_ini);
    assert_eq!(result.relative_improvement, recomputed);
}

#[test]
fn landscape_backend_runs_and_counts_clamps() {
    let inst = maxcut_instance(8, 37);
    let table = FixedParameterTable::builtin();
    let grid = Arc::new(build_protocol_landscape(&inst, 1, &table, 32).unwrap());
    let config = ProtocolConfig {
        extra_evals: 10,
        seed: 3,
        ..ProtocolConfig::default()
    };
    let result = run_protocol(
        &inst,
        1,
        &config,
        &table,
        &Backend::LandscapeOracle(grid),
    )
    .unwrap();
    assert!(result.trace.evals() <= 13);
    assert!(result.ar_final >= 0.0 && result.ar_final <= 1.0);
}

#[test]
fn spsa_and_nelder_mead_paths_run() {
    let inst = maxcut_instance(8, 39);
    let table = FixedParameterTable::builtin();
    for optimizer in [
        OptimizerKind::NelderMead,
        OptimizerKind::Spsa { a: 0.2, c: 0.1 },
    ] {
        let config = ProtocolConfig {
            optimizer,
            extra_evals: 6,
            seed: 9,
            ..ProtocolConfig::default()
        };
        let result = run_protocol(&inst, 1, &config, &table, &Backend::SampledSim).unwrap();
        assert!(result.trace.total_shots_spent() <= 10_000);
    }
}

#[test]
fn infeasible_budget_is_rejected() {
    let inst = maxcut_instance(8, 40);
    let table = FixedParameterTable::builtin();
    let config = ProtocolConfig {
        total_shots: 5,
        ..ProtocolConfig::default()
    };
    assert!(matches!(
        run_protocol(&inst, 5, &config, &table, &Backend::SampledSim),
        Err(Error::InfeasibleBudget { .. })
    ));
}
