use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("rank must be at least 1")]
    ZeroRank,

    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not anti-Hermitian (relative deviation {deviation:.3e})")]
    NotAntiHermitian { deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("not an element of K*: {0}")]
    NotTriangularPositive(String),

    #[error("not an element of the triangular algebra: {0}")]
    NotTriangularAlgebra(String),

    #[error("matrix is singular (|det| = {det_abs:.3e})")]
    Singular { det_abs: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("spectrum is not sorted non-increasingly: {0:?}")]
    UnsortedSpectrum(Vec<f64>),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("too few samples: {count} < {min}")]
    Undersampled { count: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
