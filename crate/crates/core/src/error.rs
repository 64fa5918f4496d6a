use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("domain error: {0} is not the square of a rational")]
    NotSquare(BigRational),

    /// A result contradicted an invariant that the construction guarantees.
    /// Seeing this means an arithmetic bug, not bad input.
    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// All three face diagonals are integral; the shared edge is ambiguous.
    #[error("perfect cuboid with edges {0:?}: all three face diagonals are rational")]
    PerfectCuboid([u64; 3]),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Re-labels a validation failure on a value the caller has already
    /// proven valid.
    pub(crate) fn into_internal(self, context: &str) -> Self {
        match self {
            Error::Internal(_) => self,
            other => Error::Internal(format!("{context}: {other}")),
        }
    }
}
