use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not Hermitian: max |A - A^dagger| = {asymmetry:e}")]
    NotHermitian { asymmetry: f64 },

    #[error("not positive semi-definite: min eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid probability vector: {0}")]
    BadProbability(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("POVM elements do not sum to identity: max deviation {deviation:e}")]
    Incomplete { deviation: f64 },

    #[error("invalid channel: {0}")]
    BadChannel(String),

    #[error("sampling failed: {0}")]
    Sampling(String),
}

pub type Result<T> = std::result::Result<T, Error>;
