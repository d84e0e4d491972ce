//! Exact dense statevector simulation of QAOA circuits.
//!
//! All gate operations mutate the state in place; callers that need the
//! previous state clone first. Basis-state index `x` is little-endian:
//! bit `i` of `x` is qubit `i`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{build_hamiltonian, DiagonalHamiltonian, ProblemInstance, ProblemKind};
use crate::MAX_QUBITS;

/// Dense state of `n` qubits: `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, x: u64) -> Complex64 {
        self.amps[x as usize]
    }

    /// Measurement probability of basis state `x`.
    pub fn probability(&self, x: u64) -> f64 {
        self.amps[x as usize].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Total probability on basis states of Hamming weight `k`.
    pub fn weight_sector_probability(&self, k: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(x, _)| (*x as u64).count_ones() as usize == k)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// QAOA parameters: `p` phase angles `γ` and `p` mixing angles `β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let params = Self { gamma, beta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma.len() != self.beta.len() {
            return Err(Error::DimensionMismatch {
                expected: self.gamma.len(),
                got: self.beta.len(),
            });
        }
        if self.gamma.is_empty() {
            return Err(Error::InvalidArgument("qaoa needs p >= 1".into()));
        }
        if self.gamma.iter().chain(&self.beta).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("qaoa parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.gamma.len()
    }

    /// Flat optimizer layout `[γ_1..γ_p, β_1..β_p]`.
    pub fn to_point(&self) -> Vec<f64> {
        let mut point = self.gamma.clone();
        point.extend_from_slice(&self.beta);
        point
    }

    pub fn from_point(point: &[f64]) -> Result<Self> {
        if point.len() % 2 != 0 || point.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "parameter point must have even positive length, got {}",
                point.len()
            )));
        }
        let p = point.len() / 2;
        Self::new(point[..p].to_vec(), point[p..].to_vec())
    }
}

/// Mixer Hamiltonian choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixerKind {
    /// Transverse field `Σ X_i`; exact product of commuting 1-qubit rotations.
    TransverseX,
    /// Ring `Σ (X_i X_{i+1} + Y_i Y_{i+1})`, Trotterized into sequential
    /// pair gates; preserves Hamming weight for any repetition count.
    XyRing { trotter_reps: u32 },
}

impl MixerKind {
    pub fn default_for(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::MaxCut => MixerKind::TransverseX,
            ProblemKind::Portfolio => MixerKind::XyRing { trotter_reps: 1 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let MixerKind::XyRing { trotter_reps: 0 } = self {
            return Err(Error::InvalidArgument("trotter_reps must be >= 1".into()));
        }
        Ok(())
    }
}

fn check_capacity(n: usize) -> Result<()> {
    if n < 1 || n > MAX_QUBITS {
        return Err(Error::Capacity {
            qubits: n,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Uniform superposition `|+>^n`: every amplitude `2^(−n/2)`.
pub fn prepare_plus_state(n: usize) -> Result<StateVector> {
    check_capacity(n)?;
    let size = 1usize << n;
    let amp = Complex64::new((size as f64).sqrt().recip(), 0.0);
    Ok(StateVector {
        n,
        amps: vec![amp; size],
    })
}

/// Dicke state: equal superposition of the `C(n, k)` bitstrings of
/// Hamming weight `k`.
pub fn prepare_dicke_state(n: usize, k: usize) -> Result<StateVector> {
    check_capacity(n)?;
    if k < 1 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "dicke weight k = {k} must satisfy 1 <= k <= n-1 = {}",
            n - 1
        )));
    }
    let mut count = 1u64;
    for i in 0..k {
        count = count * (n - i) as u64 / (i + 1) as u64;
    }
    let amp = Complex64::new((count as f64).sqrt().recip(), 0.0);
    let size = 1usize << n;
    let mut amps = vec![Complex64::ZERO; size];
    for (x, a) in amps.iter_mut().enumerate() {
        if (x as u64).count_ones() as usize == k {
            *a = amp;
        }
    }
    Ok(StateVector { n, amps })
}

/// Phase separator `e^{−iγ H_P}`: multiplies each amplitude by
/// `exp(−iγ·energies[x])`.
pub fn apply_phase_separator(sv: &mut StateVector, h: &DiagonalHamiltonian, gamma: f64) -> Result<()> {
    if h.n() != sv.n {
        return Err(Error::DimensionMismatch {
            expected: sv.n,
            got: h.n(),
        });
    }
    for (a, &e) in sv.amps.iter_mut().zip(h.energies()) {
        *a *= Complex64::from_polar(1.0, -gamma * e);
    }
    Ok(())
}

/// Transverse-field mixer `e^{−iβ Σ X_i}`: the terms commute, so the exact
/// result is the 1-qubit rotation
/// `[[cos β, −i sin β], [−i sin β, cos β]]` applied to every qubit.
pub fn apply_x_mixer(sv: &mut StateVector, beta: f64) {
    let c = beta.cos();
    let ms = Complex64::new(0.0, -beta.sin());
    for qubit in 0..sv.n {
        let mask = 1usize << qubit;
        for x in 0..sv.amps.len() {
            if x & mask == 0 {
                let a = sv.amps[x];
                let b = sv.amps[x | mask];
                sv.amps[x] = c * a + ms * b;
                sv.amps[x | mask] = ms * a + c * b;
            }
        }
    }
}

/// One `e^{−iθ (X_i X_j + Y_i Y_j)}` pair gate. In the two-qubit subspace it
/// acts as `|01> -> cos(2θ)|01> − i sin(2θ)|10>` (and symmetrically), and
/// leaves `|00>`, `|11>` unchanged.
pub fn apply_xy_pair(sv: &mut StateVector, i: usize, j: usize, theta: f64) -> Result<()> {
    if i >= sv.n || j >= sv.n || i == j {
        return Err(Error::InvalidArgument(format!(
            "xy pair ({i}, {j}) invalid for n = {}",
            sv.n
        )));
    }
    let c = (2.0 * theta).cos();
    let ms = Complex64::new(0.0, -(2.0 * theta).sin());
    let mask_i = 1usize << i;
    let mask_j = 1usize << j;
    for x in 0..sv.amps.len() {
        // Visit each {|01>, |10>} pair once, from its bit_i=1, bit_j=0 member.
        if x & mask_i != 0 && x & mask_j == 0 {
            let y = x ^ mask_i ^ mask_j;
            let a = sv.amps[x];
            let b = sv.amps[y];
            sv.amps[x] = c * a + ms * b;
            sv.amps[y] = ms * a + c * b;
        }
    }
    Ok(())
}

/// Ring XY mixer: pair gates over `(0,1), (1,2), …, (n−1,0)` with angle
/// `β/trotter_reps`, repeated `trotter_reps` times.
pub fn apply_xy_ring_mixer(sv: &mut StateVector, beta: f64, trotter_reps: u32) -> Result<()> {
    if sv.n < 2 {
        return Err(Error::InvalidArgument("xy ring mixer needs n >= 2".into()));
    }
    if trotter_reps == 0 {
        return Err(Error::InvalidArgument("trotter_reps must be >= 1".into()));
    }
    let theta = beta / trotter_reps as f64;
    for _ in 0..trotter_reps {
        for i in 0..sv.n {
            apply_xy_pair(sv, i, (i + 1) % sv.n, theta)?;
        }
    }
    Ok(())
}

/// A problem prepared for repeated QAOA evaluation: the Hamiltonian and
/// initial state are built once and reused across parameter queries.
#[derive(Debug, Clone)]
pub struct PreparedQaoa {
    kind: ProblemKind,
    hamiltonian: DiagonalHamiltonian,
    initial: StateVector,
    mixer: MixerKind,
}

impl PreparedQaoa {
    pub fn new(inst: &ProblemInstance, mixer: MixerKind) -> Result<Self> {
        mixer.validate()?;
        match (inst.kind(), mixer) {
            (ProblemKind::MaxCut, MixerKind::TransverseX) => {}
            (ProblemKind::Portfolio, MixerKind::XyRing { .. }) => {}
            _ => {
                return Err(Error::InvalidArgument(
                    "mixer/problem pairing must be MaxCut+TransverseX or PO+XyRing".into(),
                ))
            }
        }
        let hamiltonian = build_hamiltonian(inst)?;
        let initial = match inst {
            ProblemInstance::MaxCut(mc) => prepare_plus_state(mc.n)?,
            ProblemInstance::Portfolio(po) => prepare_dicke_state(po.n, po.k)?,
        };
        Ok(Self {
            kind: inst.kind(),
            hamiltonian,
            initial,
            mixer,
        })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn hamiltonian(&self) -> &DiagonalHamiltonian {
        &self.hamiltonian
    }

    pub fn mixer(&self) -> MixerKind {
        self.mixer
    }

    /// Runs the p-layer circuit and returns the final state.
    pub fn state(&self, params: &QaoaParams) -> Result<StateVector> {
        params.validate()?;
        let mut sv = self.initial.clone();
        for layer in 0..params.p() {
            apply_phase_separator(&mut sv, &self.hamiltonian, params.gamma[layer])?;
            match self.mixer {
                MixerKind::TransverseX => apply_x_mixer(&mut sv, params.beta[layer]),
                MixerKind::XyRing { trotter_reps } => {
                    apply_xy_ring_mixer(&mut sv, params.beta[layer], trotter_reps)?
                }
            }
        }
        Ok(sv)
    }

    /// Exact `(mean, std)` of the energy at `params`.
    pub fn energy_moments(&self, params: &QaoaParams) -> Result<(f64, f64)> {
        energy_moments(&self.state(params)?, &self.hamiltonian)
    }
}

/// Runs the QAOA circuit for the instance from its standard initial state.
pub fn run_qaoa(inst: &ProblemInstance, params: &QaoaParams, mixer: MixerKind) -> Result<StateVector> {
    PreparedQaoa::new(inst, mixer)?.state(params)
}

/// Exact energy mean and standard deviation of the state under `h`:
/// `mean = Σ p(x)·e(x)`, `std = sqrt(max(0, Σ p(x)·e(x)² − mean²))`.
pub fn energy_moments(sv: &StateVector, h: &DiagonalHamiltonian) -> Result<(f64, f64)> {
    if h.n() != sv.n {
        return Err(Error::DimensionMismatch {
            expected: sv.n,
            got: h.n(),
        });
    }
    let mut mean = 0.0;
    let mut second = 0.0;
    for (a, &e) in sv.amps.iter().zip(h.energies()) {
        let p = a.norm_sqr();
        mean += p * e;
        second += p * e * e;
    }
    Ok((mean, (second - mean * mean).max(0.0).sqrt()))
}

/// Exact expectation `<ψ|H_P|ψ>`.
pub fn expectation_energy(sv: &StateVector, h: &DiagonalHamiltonian) -> Result<f64> {
    energy_moments(sv, h).map(|(mean, _)| mean)
}

/// Exact energy standard deviation.
pub fn energy_std(sv: &StateVector, h: &DiagonalHamiltonian) -> Result<f64> {
    energy_moments(sv, h).map(|(_, std)| std)
}

/// Draws `shots` i.i.d. bitstrings from `p(x) = |amps[x]|²` by inverse-CDF
/// over the cumulative distribution. Deterministic given `seed`.
pub fn sample_bitstrings(sv: &StateVector, shots: u64, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be >= 1".into()));
    }
    let mut cdf = Vec::with_capacity(sv.amps.len());
    let mut acc = 0.0;
    for a in &sv.amps {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..shots)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * total;
            cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u64
        })
        .collect();
    Ok(samples)
}

#[cfg(test)]
#[path = "simulator_tests.rs"]
mod tests;
