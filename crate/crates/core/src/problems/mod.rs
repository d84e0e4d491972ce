//! Problem instances and their diagonal Hamiltonians.
//!
//! Covers weighted MaxCut and cardinality-constrained portfolio
//! optimization (PO). Bitstring convention throughout the crate: the
//! basis-state index `x` is read little-endian, bit `i` of `x` is
//! vertex/asset/qubit `i`. For MaxCut, spin `s_i = +1` when bit `i` is 0
//! and `-1` when it is 1.

mod generate;

pub use generate::{generate_maxcut_instance, generate_po_instance, load_po_from_csv, po_from_returns_csv};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MAX_QUBITS;

/// Weighted MaxCut on an undirected graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxCutInstance {
    /// Vertex count.
    pub n: usize,
    /// Undirected edges `(u, v, w)`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl MaxCutInstance {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let inst = Self { n, edges };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!(
                "maxcut instance needs n >= 2, got {}",
                self.n
            )));
        }
        let mut seen = HashSet::new();
        for &(u, v, w) in &self.edges {
            if u >= self.n || v >= self.n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for n = {}",
                    self.n
                )));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) has non-finite weight"
                )));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidArgument(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(())
    }

    /// Cut value of bitstring `x`: total weight of edges whose endpoints
    /// fall on opposite sides.
    pub fn cut_value(&self, x: u64) -> f64 {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| (x >> u) & 1 != (x >> v) & 1)
            .map(|&(_, _, w)| w)
            .sum()
    }
}

/// Portfolio optimization: minimize `q x'Σx − μ'x` subject to `Σ x_i = K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioInstance {
    /// Asset count.
    pub n: usize,
    /// Expected returns, length `n`.
    pub mu: Vec<f64>,
    /// Covariance matrix, `n` rows of `n` entries.
    pub sigma: Vec<Vec<f64>>,
    /// Risk factor.
    pub q: f64,
    /// Cardinality budget.
    #[serde(rename = "K")]
    pub k: usize,
}

impl PortfolioInstance {
    pub fn new(n: usize, mu: Vec<f64>, sigma: Vec<Vec<f64>>, q: f64, k: usize) -> Result<Self> {
        let inst = Self { n, mu, sigma, q, k };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!(
                "po instance needs n >= 2, got {}",
                self.n
            )));
        }
        if self.mu.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "mu has length {}, expected {}",
                self.mu.len(),
                self.n
            )));
        }
        if self.mu.iter().any(|m| !m.is_finite()) || !self.q.is_finite() {
            return Err(Error::InvalidArgument("mu and q must be finite".into()));
        }
        if self.sigma.len() != self.n || self.sigma.iter().any(|row| row.len() != self.n) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be {0}x{0}",
                self.n
            )));
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let sij = self.sigma[i][j];
                if !sij.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "sigma[{i}][{j}] is not finite"
                    )));
                }
                if (sij - self.sigma[j][i]).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "sigma is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        if self.k < 1 || self.k >= self.n {
            return Err(Error::InvalidArgument(format!(
                "budget K = {} must satisfy 1 <= K <= n-1 = {}",
                self.k,
                self.n - 1
            )));
        }
        Ok(())
    }

    /// Objective `q x'Σx − μ'x` of bitstring `x`.
    pub fn objective(&self, x: u64) -> f64 {
        let selected: Vec<usize> = (0..self.n).filter(|&i| (x >> i) & 1 == 1).collect();
        let mut risk = 0.0;
        let mut ret = 0.0;
        for &i in &selected {
            ret += self.mu[i];
            for &j in &selected {
                risk += self.sigma[i][j];
            }
        }
        self.q * risk - ret
    }

    /// Ising coefficients of the problem Hamiltonian: ZZ terms `(i, j, w_ij)`
    /// for `i < j`, Z terms `w_i`, and the constant `c`, such that
    /// `objective(x) = Σ w_ij s_i s_j + Σ w_i s_i + c` with `s_i = ±1`.
    pub fn ising_coefficients(&self) -> (Vec<(usize, usize, f64)>, Vec<f64>, f64) {
        let n = self.n;
        let mut quadratic = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                quadratic.push((i, j, 0.5 * self.q * self.sigma[i][j]));
            }
        }
        let linear: Vec<f64> = (0..n)
            .map(|i| {
                let row_sum: f64 = self.sigma[i].iter().sum();
                -0.5 * (self.q * row_sum - self.mu[i])
            })
            .collect();
        let mut constant = 0.0;
        for i in 0..n {
            let upper_row: f64 = self.sigma[i][i..].iter().sum();
            constant += 0.5 * (self.q * upper_row - self.mu[i]);
        }
        (quadratic, linear, constant)
    }
}

/// A problem instance of either family.
///
/// Serialized form is the instance-file JSON schema:
/// `{"type":"maxcut","n":..,"edges":[[u,v,w],..]}` or
/// `{"type":"po","n":..,"mu":[..],"sigma":[[..]],"q":..,"K":..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ProblemInstance {
    #[serde(rename = "maxcut")]
    MaxCut(MaxCutInstance),
    #[serde(rename = "po")]
    Portfolio(PortfolioInstance),
}

/// Problem family marker shared with the metrics module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemKind {
    MaxCut,
    Portfolio,
}

impl ProblemInstance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemInstance::MaxCut(_) => ProblemKind::MaxCut,
            ProblemInstance::Portfolio(_) => ProblemKind::Portfolio,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ProblemInstance::MaxCut(inst) => inst.n,
            ProblemInstance::Portfolio(inst) => inst.n,
        }
    }

    /// Cardinality budget for PO instances, `None` for MaxCut.
    pub fn budget_k(&self) -> Option<usize> {
        match self {
            ProblemInstance::MaxCut(_) => None,
            ProblemInstance::Portfolio(inst) => Some(inst.k),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProblemInstance::MaxCut(inst) => inst.validate(),
            ProblemInstance::Portfolio(inst) => inst.validate(),
        }
    }

    /// Parses and validates an instance-file JSON document.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let inst: ProblemInstance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        Ok(std::fs::write(path, self.to_json_string())?)
    }
}

/// Diagonal Hamiltonian stored as the classical objective value of every
/// bitstring. Any constant term of the Ising form is already folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalHamiltonian {
    n: usize,
    energies: Vec<f64>,
    offset: f64,
}

impl DiagonalHamiltonian {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, x: u64) -> f64 {
        self.energies[x as usize]
    }

    /// Constant term of the Ising form that `energies` already includes.
    pub fn offset(&self) -> f64 {
        self.offset
    }
}

fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::Capacity {
            qubits: n,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Builds the MaxCut Hamiltonian: `energies[x]` is the cut value of `x`.
pub fn build_maxcut_hamiltonian(inst: &MaxCutInstance) -> Result<DiagonalHamiltonian> {
    inst.validate()?;
    check_capacity(inst.n)?;
    let size = 1usize << inst.n;
    let mut energies = vec![0.0; size];
    for &(u, v, w) in &inst.edges {
        let mask_u = 1u64 << u;
        let mask_v = 1u64 << v;
        for (x, e) in energies.iter_mut().enumerate() {
            let x = x as u64;
            if ((x & mask_u == 0) as u8) != ((x & mask_v == 0) as u8) {
                *e += w;
            }
        }
    }
    let total_weight: f64 = inst.edges.iter().map(|&(_, _, w)| w).sum();
    Ok(DiagonalHamiltonian {
        n: inst.n,
        energies,
        offset: 0.5 * total_weight,
    })
}

/// Builds the PO Hamiltonian: `energies[x] = q x'Σx − μ'x`.
pub fn build_po_hamiltonian(inst: &PortfolioInstance) -> Result<DiagonalHamiltonian> {
    inst.validate()?;
    check_capacity(inst.n)?;
    let size = 1usize << inst.n;
    let energies: Vec<f64> = (0..size).map(|x| inst.objective(x as u64)).collect();
    let (_, _, constant) = inst.ising_coefficients();
    Ok(DiagonalHamiltonian {
        n: inst.n,
        energies,
        offset: constant,
    })
}

/// Builds the Hamiltonian for either family.
pub fn build_hamiltonian(inst: &ProblemInstance) -> Result<DiagonalHamiltonian> {
    match inst {
        ProblemInstance::MaxCut(inst) => build_maxcut_hamiltonian(inst),
        ProblemInstance::Portfolio(inst) => build_po_hamiltonian(inst),
    }
}

/// Root-mean-square normalizer over the instance's Ising coefficients:
/// `sqrt(mean(quadratic²) + mean(linear²))`, a term dropped when its
/// coefficient count is zero.
fn rescaling_divisor(quadratic: &[f64], linear: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    if !quadratic.is_empty() {
        total += quadratic.iter().map(|w| w * w).sum::<f64>() / quadratic.len() as f64;
    }
    if !linear.is_empty() {
        total += linear.iter().map(|w| w * w).sum::<f64>() / linear.len() as f64;
    }
    let divisor = total.sqrt();
    if divisor == 0.0 {
        return Err(Error::DegenerateDivisor);
    }
    Ok(divisor)
}

/// Divides the instance's objective coefficients by the RMS normalizer so
/// fixed parameters tuned on unweighted problems transfer to it.
///
/// MaxCut divides edge weights; PO divides `Σ` and `μ` jointly, which
/// divides every ZZ and Z coefficient of its Hamiltonian by the same
/// amount. Returns the rescaled instance and the divisor. A divisor within
/// 1e-12 of 1 is treated as exactly 1, making the operation idempotent.
pub fn rescale_instance(inst: &ProblemInstance) -> Result<(ProblemInstance, f64)> {
    inst.validate()?;
    match inst {
        ProblemInstance::MaxCut(mc) => {
            let weights: Vec<f64> = mc.edges.iter().map(|&(_, _, w)| w).collect();
            let divisor = rescaling_divisor(&weights, &[])?;
            if (divisor - 1.0).abs() < 1e-12 {
                return Ok((inst.clone(), 1.0));
            }
            let edges = mc
                .edges
                .iter()
                .map(|&(u, v, w)| (u, v, w / divisor))
                .collect();
            Ok((
                ProblemInstance::MaxCut(MaxCutInstance { n: mc.n, edges }),
                divisor,
            ))
        }
        ProblemInstance::Portfolio(po) => {
            let (quadratic, linear, _) = po.ising_coefficients();
            let quad_coeffs: Vec<f64> = quadratic.iter().map(|&(_, _, w)| w).collect();
            let divisor = rescaling_divisor(&quad_coeffs, &linear)?;
            if (divisor - 1.0).abs() < 1e-12 {
                return Ok((inst.clone(), 1.0));
            }
            let sigma = po
                .sigma
                .iter()
                .map(|row| row.iter().map(|s| s / divisor).collect())
                .collect();
            let mu = po.mu.iter().map(|m| m / divisor).collect();
            Ok((
                ProblemInstance::Portfolio(PortfolioInstance {
                    n: po.n,
                    mu,
                    sigma,
                    q: po.q,
                    k: po.k,
                }),
                divisor,
            ))
        }
    }
}

/// Extremes of the diagonal spectrum, optionally restricted to the
/// Hamming-weight-K feasible subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumExtremes {
    pub f_min: f64,
    pub f_max: f64,
    pub argmin: u64,
    pub argmax: u64,
    pub feasible_only: bool,
}

/// Exhaustive scan for the spectrum extremes. Ties break toward the
/// smallest bitstring index.
pub fn spectrum_extremes(
    h: &DiagonalHamiltonian,
    feasible_only: bool,
    k: Option<usize>,
) -> Result<SpectrumExtremes> {
    check_capacity(h.n)?;
    let k = if feasible_only {
        Some(k.ok_or_else(|| {
            Error::InvalidArgument("feasible-only scan requires the budget K".into())
        })?)
    } else {
        None
    };
    let mut best: Option<(f64, f64, u64, u64)> = None;
    for (x, &e) in h.energies.iter().enumerate() {
        if let Some(k) = k {
            if (x as u64).count_ones() as usize != k {
                continue;
            }
        }
        match &mut best {
            None => best = Some((e, e, x as u64, x as u64)),
            Some((f_min, f_max, argmin, argmax)) => {
                if e < *f_min {
                    *f_min = e;
                    *argmin = x as u64;
                }
                if e > *f_max {
                    *f_max = e;
                    *argmax = x as u64;
                }
            }
        }
    }
    let (f_min, f_max, argmin, argmax) =
        best.ok_or_else(|| Error::InvalidArgument("no bitstring satisfies the constraint".into()))?;
    Ok(SpectrumExtremes {
        f_min,
        f_max,
        argmin,
        argmax,
        feasible_only,
    })
}
