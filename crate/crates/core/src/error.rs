use thiserror::Error;

use crate::scalars::ScalarError;

/// Errors shared by the ring, map and module layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The input lies outside the supported classes or ideal shapes.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A search or closure did not finish within its configured bound.
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    /// An internal consistency check failed; indicates a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
