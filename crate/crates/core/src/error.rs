use alloc::string::String;

/// Errors raised by the core routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix order mismatch: expected {expected}, got {got}")]
    OrderMismatch { expected: usize, got: usize },

    #[error("matrix order {0} is too small")]
    OrderTooSmall(usize),

    #[error("entry count {got} does not match order {order} (expected {expected})")]
    ShapeMismatch {
        order: usize,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },

    #[error("mask is not symmetric at ({row}, {col})")]
    AsymmetricMask { row: usize, col: usize },

    #[error("guess matrix is not symmetric on the missing position ({row}, {col})")]
    AsymmetricGuess { row: usize, col: usize },

    #[error("entry ({row}, {col}) = {value} exceeds the bound {bound}")]
    BoundViolation {
        row: usize,
        col: usize,
        value: f64,
        bound: f64,
    },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("bound must be positive and finite, got {0}")]
    InvalidBound(f64),

    #[error("candidate value {value} lies outside [-{bound}, {bound}]")]
    TargetOutOfRange { value: f64, bound: f64 },

    #[error("index ({row}, {col}) out of range for order {order}")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        order: usize,
    },

    #[error("target entry must be off-diagonal, got ({0}, {0})")]
    DiagonalTarget(usize),

    #[error("target must sit at (n+1, n) in canonical position, found ({row}, {col})")]
    NonCanonicalTarget { row: usize, col: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("column index {index} out of range for {n} columns")]
    ColumnOutOfRange { index: usize, n: usize },

    #[error("columns must differ, got {0} twice")]
    SameColumn(usize),

    #[error("bandwidth vector has length {got}, expected {expected}")]
    BandwidthLength { expected: usize, got: usize },

    #[error("bandwidth must be positive, got {0}")]
    InvalidBandwidth(f64),

    #[error("score vector is empty")]
    EmptyScores,

    #[error("probability {name} = {value} out of range")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("grid needs at least 2 points, got {0}")]
    InvalidGrid(usize),

    #[error("requested {requested} missing pairs but only {available} are eligible")]
    TooManyPairs { requested: usize, available: usize },

    #[error("eigendecomposition failed on non-finite input")]
    Decomposition,
}

pub type Result<T> = core::result::Result<T, Error>;
