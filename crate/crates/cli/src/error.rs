use std::fmt;

use dwt_core::Error;

/// A failed run, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: config, potential, schedule or family.
    Validation(String),
    /// Non-convergence, a bracket too wide, or an oracle disagreement.
    Numeric(String),
    Io(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Numeric(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "validation failure: {m}"),
            Failure::Numeric(m) => write!(f, "numeric failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::DivergentTail(_)
            | Error::NumericFailure(_)
            | Error::Divergence { .. }
            | Error::BracketTooWide { .. }
            | Error::Budget(_) => Failure::Numeric(msg),
            _ => Failure::Validation(msg),
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;
