use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix has {len} entries but shape is {rows}x{cols}")]
    BadShape {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("not a projector (||M^2 - M||_F = {0:e})")]
    NotProjector(f64),

    #[error("POVM elements do not sum to identity (deviation {0:e})")]
    IncompletePovm(f64),

    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),

    #[error("invalid subsystem selection: {0}")]
    BadSubsystems(String),

    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("reduced states differ by {0:e}; no local unitary links the two purifications")]
    ReducedStateMismatch(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("probability distribution sums to {0}, expected 1")]
    BadDistribution(f64),

    #[error("encoding does not hide the XOR (learn probability {value}, baseline {baseline})")]
    XorLeak { value: f64, baseline: f64 },

    #[error("label mismatch: {0}")]
    LabelMismatch(String),

    #[error("SDP solver stopped with status {status:?} after {iterations} iterations")]
    Solver {
        status: crate::sdp::SolveStatus,
        iterations: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
