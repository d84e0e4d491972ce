//! Random instance generators and CSV ingestion.

use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::problems::{MaxCutInstance, PortfolioInstance};

/// Edge-weight mixture: N(0,1) w.p. 0.5, N(5,2) w.p. 0.3, N(10,1) w.p. 0.2,
/// second argument a variance.
fn sample_mixture_weight(rng: &mut ChaCha8Rng) -> f64 {
    let (mean, variance): (f64, f64) = match rng.random::<f64>() {
        r if r < 0.5 => (0.0, 1.0),
        r if r < 0.8 => (5.0, 2.0),
        _ => (10.0, 1.0),
    };
    Normal::new(mean, variance.sqrt()).unwrap().sample(rng)
}

/// Uniformly shuffled stub pairing for a simple 3-regular graph; pairings
/// with self-loops or multi-edges are rejected and redrawn.
fn random_cubic_edges(n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| [v, v, v]).collect();
    for _ in 0..100_000 {
        stubs.shuffle(rng);
        let mut adjacent = vec![false; n * n];
        let mut edges = Vec::with_capacity(3 * n / 2);
        let mut simple = true;
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || adjacent[u * n + v] {
                simple = false;
                break;
            }
            adjacent[u * n + v] = true;
            edges.push((u, v));
        }
        if simple {
            edges.sort_unstable();
            return Ok(edges);
        }
    }
    // P(simple) for 3-regular pairings is bounded away from 0, so this is
    // unreachable in practice.
    Err(Error::InvalidArgument(format!(
        "could not sample a simple 3-regular graph on {n} vertices"
    )))
}

/// Random 3-regular MaxCut instance with Gaussian-mixture edge weights.
/// Deterministic given `seed`.
pub fn generate_maxcut_instance(n: usize, seed: u64) -> Result<MaxCutInstance> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "3-regular graphs need even n >= 4, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = random_cubic_edges(n, &mut rng)?
        .into_iter()
        .map(|(u, v)| (u, v, sample_mixture_weight(&mut rng)))
        .collect();
    MaxCutInstance::new(n, edges)
}

/// Synthetic PO instance: `Σ = FF' + diag(d)` with `F` an n×3 standard
/// normal factor matrix and `d > 0`, so `Σ` is positive-definite;
/// `μ = 0.1·N(0,1)`, `q = 0.5`, `K = ⌊n/2⌋`. Deterministic given `seed`.
pub fn generate_po_instance(n: usize, seed: u64) -> Result<PortfolioInstance> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("po needs n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let factors: Vec<[f64; 3]> = (0..n)
        .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect();
    let diag: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.1)).collect();
    let mut sigma = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let mut s: f64 = (0..3).map(|f| factors[i][f] * factors[j][f]).sum();
            if i == j {
                s += diag[i];
            }
            sigma[i][j] = s;
            sigma[j][i] = s;
        }
    }
    let mu: Vec<f64> = (0..n).map(|_| 0.1 * normal.sample(&mut rng)).collect();
    PortfolioInstance::new(n, mu, sigma, 0.5, n / 2)
}

/// Builds a PO instance from a CSV of per-period returns.
///
/// Format: a header row of asset names, then one row per period with
/// decimal returns. The first `n` columns are used; `μ` is the sample mean
/// and `Σ` the sample covariance (normalized by `T − 1`).
pub fn po_from_returns_csv<R: Read>(reader: R, n: usize, k: usize, q: f64) -> Result<PortfolioInstance> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header_width = csv_reader.headers()?.len();
    if header_width < n {
        return Err(Error::Schema(format!(
            "returns csv has {header_width} columns, need at least {n}"
        )));
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (row_index, record) in csv_reader.records().enumerate() {
        let record = record?;
        if record.len() < n {
            return Err(Error::Schema(format!(
                "row {}: has {} fields, need at least {n}",
                row_index + 2,
                record.len()
            )));
        }
        let mut row = Vec::with_capacity(n);
        for (col, field) in record.iter().take(n).enumerate() {
            let value: f64 = field.trim().parse().map_err(|_| {
                Error::Schema(format!(
                    "row {}, column {}: not a number: {field:?}",
                    row_index + 2,
                    col + 1
                ))
            })?;
            if !value.is_finite() {
                return Err(Error::Schema(format!(
                    "row {}, column {}: non-finite return",
                    row_index + 2,
                    col + 1
                )));
            }
            row.push(value);
        }
        rows.push(row);
    }
    let periods = rows.len();
    if periods < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 return rows to estimate a covariance, got {periods}"
        )));
    }
    let mu: Vec<f64> = (0..n)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / periods as f64)
        .collect();
    let mut sigma = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let cov: f64 = rows
                .iter()
                .map(|r| (r[i] - mu[i]) * (r[j] - mu[j]))
                .sum::<f64>()
                / (periods - 1) as f64;
            sigma[i][j] = cov;
            sigma[j][i] = cov;
        }
    }
    PortfolioInstance::new(n, mu, sigma, q, k)
}

/// [`po_from_returns_csv`] applied to a file on disk.
pub fn load_po_from_csv(path: impl AsRef<Path>, n: usize, k: usize, q: f64) -> Result<PortfolioInstance> {
    po_from_returns_csv(std::fs::File::open(path)?, n, k, q)
}
