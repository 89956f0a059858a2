use thiserror::Error;

use crate::potential::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid plateau sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("potential fails the double-well conditions:\n{0}")]
    Validation(Box<ValidationReport>),

    /// Geometric tails diverge at lambda = 1.
    #[error("divergent series tail (lambda - 1 = {0:e})")]
    DivergentTail(f64),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("no convergence after {iterations} iterations (last change {last_change:e})")]
    Divergence { iterations: usize, last_change: f64 },

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    /// The tail value itself attains the coincidence minimum, so the
    /// coincidence number would be infinite.
    #[error("coincidence attained by the tail value {0}; the coincidence number is infinite")]
    InfiniteCoincidence(f64),

    #[error("cylinder word must be nonempty")]
    EmptyWord,

    #[error("invalid cylinder word {0:?}: only '0' and '1' are allowed")]
    InvalidWord(String),

    #[error("stage schedule rejected: {0}")]
    Schedule(String),

    #[error("truncation bracket too wide at stage {stage}: beta * eps = {width:e} exceeds {limit:e}; deepen the schedule")]
    BracketTooWide { stage: usize, width: f64, limit: f64 },

    #[error("enumeration budget exceeded: {0} patterns")]
    Budget(u64),

    #[error("oracle depth {0} out of range (2..=14)")]
    OracleDepth(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
