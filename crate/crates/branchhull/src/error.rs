use thiserror::Error;

/// Errors surfaced by instance construction, generation, and the analysis
/// routines. Solver non-convergence is not an error; it is reported through
/// [`crate::solver::Status`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("noise half-width must be nonnegative, got {0}")]
    NegativeAlpha(f64),

    #[error("zero vector passed to an operation that requires a nonzero input")]
    ZeroVector,

    #[error("hull level must be positive, got {0}; use the halfplane projection for level 0")]
    NonPositiveLevel(f64),

    #[error("sign entry at row {0} is zero but the measurement is nonzero; the branch constraint is undefined")]
    UndefinedBranch(usize),

    #[error("noise entry {index} is {value}, below -1; sign-altering noise is out of range")]
    NoiseOutOfRange { index: usize, value: f64 },

    #[error("minimum-norm point search hit the iteration cap with duality gap {gap:.3e}; sample is indeterminate")]
    Indeterminate { gap: f64 },

    #[error("{discarded} of {trials} Monte Carlo samples were indeterminate (over the 1% budget)")]
    IndeterminateRate { discarded: usize, trials: usize },

    #[error("brute-force oracle supports K+N <= 4, got {0}")]
    OracleDimension(usize),

    #[error("result table is empty")]
    EmptyTable,

    #[error("result table does not match the requested plot kind: {0}")]
    TableShape(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
