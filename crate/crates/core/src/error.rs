use thiserror::Error;

/// Errors produced by the ensemble library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("row lengths must be weakly decreasing: {0:?}")]
    NotWeaklyDecreasing(Vec<u32>),

    #[error("coordinates must be strictly decreasing: {0:?}")]
    NotStrictlyDecreasing(Vec<u32>),

    #[error("partition {rows:?} does not fit the {n}x{k} box")]
    OutsideBox { rows: Vec<u32>, n: usize, k: usize },

    #[error("expected {expected} coordinates, got {got}")]
    CoordCount { expected: usize, got: usize },

    #[error("lattice point {a} outside 0..={max}")]
    OutsideLattice { a: usize, max: usize },

    #[error("enumeration of {count} items exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative radicand {value:e} in {context}")]
    NegativeRadicand { value: f64, context: &'static str },

    #[error("eigenvalue mismatch {mismatch:e} at sorted index {index} exceeds {tolerance:e}")]
    EigenvalueMismatch {
        index: usize,
        mismatch: f64,
        tolerance: f64,
    },

    #[error("ambiguous eigenvalue pairing: analytic gap {gap:e} below mismatch {mismatch:e}")]
    AmbiguousPairing { gap: f64, mismatch: f64 },

    #[error("dimension {dim} exceeds the eigensolver budget {budget}")]
    TooLarge { dim: usize, budget: usize },

    #[error("non-finite value in {0}")]
    Overflow(&'static str),

    #[error("kernel is not a rank-{rank} projection: trace {trace}")]
    NotProjection { rank: usize, trace: f64 },

    #[error("conditional probability {value:e} at site {site} is negative")]
    NegativeProbability { site: usize, value: f64 },

    #[error("limit did not converge: {0}")]
    NoConvergence(String),

    #[error("root bracket failure: {0}")]
    Bracket(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
