//! Approximation-ratio metrics.
//!
//! MaxCut (maximization): `AR(x) = (f(x) − f_min) / (f_max − f_min)`.
//! PO (minimization, cardinality-constrained): `AR(x) = (f(x) − f_max) /
//! (f_min − f_max)` when `popcount(x) = K`, else 0. Both land in `[0, 1]`.

use crate::error::{Error, Result};
use crate::problems::{
    spectrum_extremes, DiagonalHamiltonian, ProblemKind, SpectrumExtremes,
};
use crate::simulator::StateVector;

/// Everything needed to score a bitstring: the objective, the spectrum
/// extremes (feasible-only for PO), and the problem family.
#[derive(Debug, Clone)]
pub struct ArContext<'a> {
    hamiltonian: &'a DiagonalHamiltonian,
    extremes: SpectrumExtremes,
    kind: ProblemKind,
    k: Option<usize>,
}

impl<'a> ArContext<'a> {
    pub fn for_maxcut(hamiltonian: &'a DiagonalHamiltonian) -> Result<Self> {
        let extremes = spectrum_extremes(hamiltonian, false, None)?;
        Self::validated(hamiltonian, extremes, ProblemKind::MaxCut, None)
    }

    pub fn for_portfolio(hamiltonian: &'a DiagonalHamiltonian, k: usize) -> Result<Self> {
        let extremes = spectrum_extremes(hamiltonian, true, Some(k))?;
        Self::validated(hamiltonian, extremes, ProblemKind::Portfolio, Some(k))
    }

    fn validated(
        hamiltonian: &'a DiagonalHamiltonian,
        extremes: SpectrumExtremes,
        kind: ProblemKind,
        k: Option<usize>,
    ) -> Result<Self> {
        if extremes.f_max == extremes.f_min {
            return Err(Error::DegenerateSpectrum);
        }
        Ok(Self {
            hamiltonian,
            extremes,
            kind,
            k,
        })
    }

    pub fn extremes(&self) -> &SpectrumExtremes {
        &self.extremes
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.hamiltonian.n()
    }
}

/// Approximation ratio of a single bitstring; always in `[0, 1]`.
pub fn approximation_ratio(x: u64, ctx: &ArContext) -> f64 {
    let ext = &ctx.extremes;
    let ratio = match ctx.kind {
        ProblemKind::MaxCut => {
            (ctx.hamiltonian.energy(x) - ext.f_min) / (ext.f_max - ext.f_min)
        }
        ProblemKind::Portfolio => {
            let k = ctx.k.expect("portfolio context always carries K");
            if x.count_ones() as usize != k {
                return 0.0;
            }
            (ctx.hamiltonian.energy(x) - ext.f_max) / (ext.f_min - ext.f_max)
        }
    };
    ratio.clamp(0.0, 1.0)
}

/// Expected AR of a state: `Σ_x |amps[x]|²·AR(x)` by exact enumeration.
pub fn expected_ar(sv: &StateVector, ctx: &ArContext) -> Result<f64> {
    if sv.n() != ctx.n() {
        return Err(Error::DimensionMismatch {
            expected: ctx.n(),
            got: sv.n(),
        });
    }
    let mut total = 0.0;
    for x in 0..sv.amps().len() as u64 {
        let p = sv.probability(x);
        if p > 0.0 {
            total += p * approximation_ratio(x, ctx);
        }
    }
    Ok(total)
}

/// Mean AR of a sample of bitstrings and its standard error `s/√M`
/// (Bessel-corrected sample std; stderr 0 for a single sample).
pub fn sample_mean_ar(samples: &[u64], ctx: &ArContext) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("sample_mean_ar needs at least one bitstring"));
    }
    let m = samples.len() as f64;
    let ars: Vec<f64> = samples.iter().map(|&x| approximation_ratio(x, ctx)).collect();
    let mean = ars.iter().sum::<f64>() / m;
    if samples.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = ars.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (m - 1.0);
    Ok((mean, (var / m).sqrt()))
}

/// Fraction of the gap between the initial-parameter AR and the
/// optimal-parameter AR closed by `ar_x`. May exceed 1 or go negative.
pub fn relative_ar_improvement(ar_x: f64, ar_ini: f64, ar_opt: f64) -> Result<f64> {
    if (ar_opt - ar_ini).abs() < 1e-12 {
        return Err(Error::DegenerateInstance);
    }
    Ok((ar_x - ar_ini) / (ar_opt - ar_ini))
}
