//! Shot-frugal QAOA parameter setting.
//!
//! The crate wires together everything needed to tune QAOA parameters when
//! the number of circuit executions (shots) is the scarce resource:
//!
//! - [`problems`]: weighted MaxCut and portfolio-optimization instances,
//!   their diagonal Hamiltonians, weight rescaling, and instance generators;
//! - [`simulator`]: exact dense statevector simulation of QAOA circuits
//!   with transverse-field X and Hamming-weight-preserving XY mixers;
//! - [`metrics`]: approximation-ratio metrics and relative improvement;
//! - [`dfo`]: derivative-free optimizers driven through a shot-metered
//!   objective oracle, plus the shot-budget allocator;
//! - [`landscape`]: precomputed (mean, std) energy grids that answer
//!   objective queries by interpolation plus Gaussian shot noise;
//! - [`protocol`]: the end-to-end pipeline (rescale, fixed initial
//!   parameters, parameter scaling, budget allocation, fine-tuning,
//!   exact-evaluation reporting);
//! - [`bench`]: reproducible sweep manifests, per-run records, and
//!   aggregation into report rows.

pub mod bench;
pub mod dfo;
pub mod error;
pub mod landscape;
pub mod metrics;
pub mod problems;
pub mod protocol;
pub mod seeding;
pub mod simulator;

pub use error::{Error, Result};

/// Dense-simulation capacity cap: 2^24 amplitudes / Hamiltonian entries.
pub const MAX_QUBITS: usize = 24;
