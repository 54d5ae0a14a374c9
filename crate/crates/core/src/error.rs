use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An enumeration guard was exceeded.
    #[error("{what}: size {size} exceeds the limit {limit}")]
    Resource {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    /// The hypothesis of a bound does not hold for the given input.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("modulus mismatch: expected {expected}, found {found}")]
    ModulusMismatch { expected: u64, found: u64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("no proper GAP found after {rejections} rejections")]
    SamplingFailure { rejections: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("unsupported modulus {q}: {reason}")]
    UnsupportedModulus { q: u64, reason: String },

    /// A row violated the completion inequality; carries the offending witness.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed report: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn guard(what: &'static str, size: u128, limit: u128) -> Result<()> {
        if size > limit {
            Err(Error::Resource { what, size, limit })
        } else {
            Ok(())
        }
    }
}
