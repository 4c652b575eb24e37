//! Shared error type for every numeric operation in the crate.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OpucError {
    #[error("grid size {0} is invalid: must be a power of two and at least 16")]
    InvalidGrid(usize),

    #[error("frequency {k} outside Nyquist range for {n_points}-point grid")]
    NyquistRange { k: i64, n_points: usize },

    #[error("matrix dimension {dim} exceeds the dense cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigenvalue iteration failed to converge; {} eigenvalues recovered", partial.len())]
    EigNonConvergence { partial: Vec<Complex64> },

    #[error("Verblunsky coefficient at index {index} has modulus {modulus} >= 1")]
    InvalidCoefficient { index: usize, modulus: f64 },

    #[error("grid too coarse: need at least {required} points, have {available}")]
    Resolution { required: usize, available: usize },

    #[error("Toeplitz positivity margin violated at order {order}: measure supported on <= {order} points")]
    TrivialMeasure { order: usize },

    #[error("measure not normalized: total mass {total}")]
    Unnormalized { total: f64 },

    #[error("Szego condition fails: entropy is -inf")]
    SzegoConditionFailure,

    #[error("truncation {given} too small; need at least {required}")]
    TruncationTooSmall { given: usize, required: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),
}

pub type Result<T> = std::result::Result<T, OpucError>;
