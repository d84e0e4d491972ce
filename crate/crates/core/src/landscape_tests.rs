use approx::assert_abs_diff_eq;

use super::*;
use crate::problems::generate_maxcut_instance;
use crate::seeding::derive_seed;

fn affine_grid(resolution: usize) -> LandscapeGrid {
    // mean = 2γ − 3β + 1, std = 0.5 everywhere
    let bounds = vec![(-1.0, 1.0), (0.0, 2.0)];
    let mut grid = LandscapeGrid {
        dims: 2,
        bounds,
        resolution,
        center: vec![0.0, 1.0],
        mean: vec![0.0; resolution * resolution],
        std: vec![0.5; resolution * resolution],
    };
    for flat in 0..grid.nodes() {
        let c = grid.node_coord(flat);
        grid.mean[flat] = 2.0 * c[0] - 3.0 * c[1] + 1.0;
    }
    grid
}

fn maxcut_grid(resolution: usize) -> (ProblemInstance, LandscapeGrid) {
    let inst = ProblemInstance::MaxCut(generate_maxcut_instance(8, 17).unwrap());
    let bounds = centered_bounds(&[0.6, 0.4], std::f64::consts::FRAC_PI_4);
    let grid = compute_landscape(&inst, 1, MixerKind::TransverseX, &bounds, resolution).unwrap();
    (inst, grid)
}

#[test]
fn two_point_grid_hits_box_corners() {
    let (_, grid) = maxcut_grid(2);
    assert_eq!(grid.nodes(), 4);
    let (lo_g, hi_g) = grid.bounds()[0];
    let (lo_b, hi_b) = grid.bounds()[1];
    assert_eq!(grid.node_coord(0), vec![lo_g, lo_b]);
    assert_eq!(grid.node_coord(1), vec![lo_g, hi_b]);
    assert_eq!(grid.node_coord(2), vec![hi_g, lo_b]);
    assert_eq!(grid.node_coord(3), vec![hi_g, hi_b]);
    assert!(grid.std().iter().all(|&s| s >= 0.0));
}

#[test]
fn grid_nodes_match_direct_simulation() {
    // Oracle: per-point exact moments straight from the simulator.
    let (inst, grid) = maxcut_grid(16);
    let prepared = PreparedQaoa::new(&inst, MixerKind::TransverseX).unwrap();
    for flat in [0usize, 7, 64, 129, 255] {
        let coord = grid.node_coord(flat);
        let params = QaoaParams::new(vec![coord[0]], vec![coord[1]]).unwrap();
        let (mean, std) = prepared.energy_moments(&params).unwrap();
        assert_abs_diff_eq!(grid.mean()[flat], mean, epsilon = 1e-12);
        assert_abs_diff_eq!(grid.std()[flat], std, epsilon = 1e-12);
    }
}

#[test]
fn grid_capacity_cap() {
    let inst = ProblemInstance::MaxCut(generate_maxcut_instance(4, 0).unwrap());
    let bounds = centered_bounds(&[0.0, 0.0], 1.0);
    assert!(matches!(
        compute_landscape_capped(&inst, 1, MixerKind::TransverseX, &bounds, 200, 100),
        Err(Error::GridCapacity { .. })
    ));
}

#[test]
fn interpolation_is_exact_at_nodes_and_on_affine_functions() {
    let grid = affine_grid(9);
    for flat in [0usize, 5, 40, 80] {
        let coord = grid.node_coord(flat);
        let (mean, std) = grid.interpolate(&coord).unwrap();
        assert_abs_diff_eq!(mean, grid.mean[flat], epsilon = 1e-12);
        assert_abs_diff_eq!(std, 0.5, epsilon = 1e-12);
    }
    // Random interior points: multilinear interpolation reproduces any
    // affine function exactly.
    let mut state = 9u64;
    for _ in 0..50 {
        state = derive_seed(state, &[1]);
        let u = (state >> 11) as f64 / (1u64 << 53) as f64;
        state = derive_seed(state, &[2]);
        let v = (state >> 11) as f64 / (1u64 << 53) as f64;
        let point = [-1.0 + 2.0 * u, 2.0 * v];
        let (mean, _) = grid.interpolate(&point).unwrap();
        assert_abs_diff_eq!(mean, 2.0 * point[0] - 3.0 * point[1] + 1.0, epsilon = 1e-12);
    }
}

#[test]
fn interpolation_midpoint_of_edge() {
    let mut grid = affine_grid(2);
    grid.mean = vec![1.0, 3.0, 1.0, 3.0];
    let (mean, _) = grid.interpolate(&[-1.0, 1.0]).unwrap();
    assert_abs_diff_eq!(mean, 2.0, epsilon = 1e-12);
}

#[test]
fn sampled_eval_is_exact_when_std_is_zero() {
    let mut grid = affine_grid(3);
    grid.std = vec![0.0; grid.nodes()];
    let point = [0.3, 0.7];
    let (mean, _) = grid.interpolate(&point).unwrap();
    for seed in 0..5 {
        assert_eq!(grid.sampled_eval(&point, 100, seed).unwrap(), mean);
    }
}

#[test]
fn sampled_eval_variance_tracks_clt() {
    let grid = affine_grid(5);
    let point = [0.2, 1.3];
    let (mean, std) = grid.interpolate(&point).unwrap();
    let shots = 500u64;
    let draws = 100_000;
    let values: Vec<f64> = (0..draws)
        .map(|i| grid.sampled_eval(&point, shots, derive_seed(3, &[i])).unwrap())
        .collect();
    let sample_mean: f64 = values.iter().sum::<f64>() / draws as f64;
    let sample_var: f64 =
        values.iter().map(|v| (v - sample_mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    let expected = std * std / shots as f64;
    assert!(
        (sample_var - expected).abs() < 0.05 * expected,
        "variance {sample_var} vs {expected}"
    );
    assert_abs_diff_eq!(grid.sampled_eval(&point, 1_000_000_000_000, 9).unwrap(), mean, epsilon = 1e-4);
}

#[test]
fn sampled_eval_noise_shrinks_with_shots() {
    let grid = affine_grid(5);
    let point = [0.4, 0.9];
    let spread = |shots: u64| {
        let values: Vec<f64> = (0..2000)
            .map(|i| grid.sampled_eval(&point, shots, derive_seed(77, &[shots, i])).unwrap())
            .collect();
        let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64
    };
    let (v200, v769, v5000) = (spread(200), spread(769), spread(5000));
    assert!(v200 > v769 && v769 > v5000, "{v200} {v769} {v5000}");
}

#[test]
fn container_round_trip_is_bitwise() {
    let (_, grid) = maxcut_grid(8);
    let bytes = grid.to_bytes();
    let back = LandscapeGrid::from_bytes(&bytes).unwrap();
    assert_eq!(grid, back);
    assert_eq!(bytes, back.to_bytes());
}

#[test]
fn container_rejects_corruption() {
    let (_, grid) = maxcut_grid(4);
    let good = grid.to_bytes();

    let mut bad_magic = good.clone();
    bad_magic[0] = b'X';
    assert!(matches!(LandscapeGrid::from_bytes(&bad_magic), Err(Error::Schema(_))));

    let mut bad_version = good.clone();
    bad_version[4] = 9;
    assert!(LandscapeGrid::from_bytes(&bad_version).is_err());

    let truncated = &good[..good.len() - 3];
    assert!(LandscapeGrid::from_bytes(truncated).is_err());

    let mut huge_res = good.clone();
    huge_res[12..16].copy_from_slice(&u32::MAX.to_le_bytes());
    assert!(LandscapeGrid::from_bytes(&huge_res).is_err());

    assert!(LandscapeGrid::from_bytes(b"").is_err());
}

#[test]
fn export_import_files() {
    let (_, grid) = maxcut_grid(4);
    let dir = std::env::temp_dir().join("shotqaoa_grid_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("grid.qgrd");
    grid.export(&path).unwrap();
    let back = LandscapeGrid::import(&path).unwrap();
    assert_eq!(grid, back);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn oracle_counts_clamps_and_negates() {
    let grid = Arc::new(affine_grid(5));
    let oracle = LandscapeOracle::new(grid.clone(), true);
    use crate::dfo::ObjectiveOracle;
    let inside = oracle.eval(&[0.0, 1.0], 1_000_000_000_000, 0);
    let (mean, _) = grid.interpolate(&[0.0, 1.0]).unwrap();
    assert_abs_diff_eq!(inside, -mean, epsilon = 1e-3);
    assert_eq!(oracle.clamp_events(), 0);
    oracle.eval(&[5.0, 1.0], 100, 1);
    assert_eq!(oracle.clamp_events(), 1);
    // Clamped query equals the boundary query with the same seed.
    let at_edge = oracle.eval(&[1.0, 1.0], 100, 7);
    let outside = oracle.eval(&[9.0, 1.0], 100, 7);
    assert_eq!(at_edge, outside);
}

#[test]
fn csv_rows_follow_node_order() {
    let (_, grid) = maxcut_grid(2);
    let mut out = Vec::new();
    grid.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0], "gamma,beta,mean,std");
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), grid.bounds()[0].0);
}
