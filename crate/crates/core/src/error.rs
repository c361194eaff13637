//! Error type shared by all modules of the lab.

use thiserror::Error;

/// Errors raised by the laboratory's operations.
///
/// The variants are grouped by how a front end should react: bad inputs
/// (`Precondition`), exhausted budgets (`ResourceCap`, `PrecisionExhausted`),
/// and checks that failed where an identity was expected to hold
/// (`InvariantViolation`). The latter signals a bug or a map outside the
/// hypotheses, never a tolerable numerical outcome.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A non-finite value showed up where a finite one is required.
    #[error("non-finite input in {0}")]
    NonFinite(&'static str),

    /// An orbit or level budget was exceeded.
    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    ResourceCap {
        what: String,
        needed: usize,
        cap: usize,
    },

    /// A continued-fraction expansion ran out of meaningful digits.
    #[error("precision exhausted after {achieved} levels (requested {requested})")]
    PrecisionExhausted { achieved: usize, requested: usize },

    /// The dynamical partial-quotient algorithm detected (numerically)
    /// rational behaviour: a zero count or a collapsed segment.
    #[error("periodic orbit detected at level {level}: {detail}")]
    PeriodicOrbit { level: usize, detail: String },

    /// Parameter tuning could not bracket or refine the target.
    #[error("tuning failed: {0}")]
    TuningFailed(String),

    /// A quantity that must hold as an identity (up to rounding) did not.
    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }
}
