//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{qubits} qubits exceeds the dense-simulation cap of {max}")]
    Capacity { qubits: usize, max: usize },

    #[error("landscape grid of {cells} cells exceeds the cap of {max}")]
    GridCapacity { cells: u128, max: u64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("all objective coefficients are zero; rescaling divisor is undefined")]
    DegenerateDivisor,

    #[error("objective spectrum is flat (f_max == f_min); approximation ratio undefined")]
    DegenerateSpectrum,

    #[error("optimal and initial approximation ratios coincide; instance skipped")]
    DegenerateInstance,

    #[error("budget of {total_shots} shots cannot fund {evals} evaluations")]
    InfeasibleBudget { total_shots: u64, evals: usize },

    #[error("linear interpolation simplex is degenerate")]
    DegenerateSimplex,

    #[error("no fixed parameters for family {family} at p={p}")]
    MissingTableEntry { family: String, p: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
