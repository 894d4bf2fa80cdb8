use thiserror::Error;

/// Errors surfaced by the algebraic and spectral operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frame rank mismatch: expected q={expected}, got q={got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("degree mismatch: expected p={expected}, got p={got}")]
    DegreeMismatch { expected: usize, got: usize },

    #[error("degree p={p} out of range for q={q}")]
    DegreeOutOfRange { p: usize, q: usize },

    #[error("combined degree {degree} exceeds frame rank q={q}")]
    DegreeOverflow { degree: usize, q: usize },

    #[error("invalid multi-index {indices:?} for q={q}: entries must be strictly increasing in 1..=q")]
    InvalidMultiIndex { indices: Vec<usize>, q: usize },

    #[error("basis rank {rank} out of range for q={q}, p={p}")]
    RankOutOfRange { rank: usize, q: usize, p: usize },

    #[error("matrix has {got} rows, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric: max |A - A^T| entry = {residual:.3e}")]
    NotSymmetric { residual: f64 },

    #[error("matrix is not skew-symmetric: max |A + A^T| entry = {residual:.3e}")]
    NotSkewSymmetric { residual: f64 },

    #[error("coefficient vector has length {got}, expected {expected}")]
    CoefficientLength { expected: usize, got: usize },

    #[error("block index pair ({i},{j}) invalid: need 1 <= i < j <= {m}")]
    InvalidBlockIndex { i: usize, j: usize, m: usize },

    #[error("model precondition violated: {0}")]
    ModelPrecondition(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
