use thiserror::Error;

/// Errors produced by the embedding pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("entries ({row},{col}) and ({col},{row}) differ beyond tolerance")]
    AsymmetricEntry { row: usize, col: usize },

    #[error("entry ({row},{col}) is negative")]
    NegativeEntry { row: usize, col: usize },

    #[error("diagonal entry ({0},{0}) is nonzero")]
    NonzeroDiagonal(usize),

    #[error("entry ({row},{col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("matrix is not circulant: entry ({row},{col}) differs from the shifted first row")]
    NotCirculant { row: usize, col: usize },

    #[error("need at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },

    #[error("point {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error(
        "requested {requested} eigenfunctions but only {available} points carry positive weight"
    )]
    ZeroWeightRequested { requested: usize, available: usize },

    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("Fourier mode {k} out of range for size {n}")]
    ModeOutOfRange { k: usize, n: usize },

    #[error("mode 0 is the centered-out constant and has no closed-form eigenvalue")]
    ZeroMode,

    #[error("series cutoff must be at least 2, got {0}")]
    BadCutoff(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
