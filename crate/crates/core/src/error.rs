//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library.
///
/// Resource caps are first-class citizens: much of the group-theoretic and
/// p-adic machinery is exact but exponential, so operations declare caps and
/// report when an input exceeds them instead of running away.
#[derive(Debug, Error)]
pub enum Error {
    /// A permutation or group input violated a precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A configured resource cap was exceeded.
    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),

    /// p-adic working precision hit the configured ceiling.
    #[error("precision ceiling reached: {0}")]
    PrecisionCeiling(String),

    /// An algorithm is not applicable to its input (used by dispatchers that
    /// fall through to the next strategy).
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Every strategy in a sequence failed.
    #[error("all strategies failed: {0}")]
    Exhausted(String),

    /// Failure parsing a parameterization string, polynomial, or group text.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Shorthand for [`Error::Invalid`].
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Shorthand for [`Error::CapExceeded`].
    pub fn cap(msg: impl Into<String>) -> Self {
        Error::CapExceeded(msg.into())
    }
}
