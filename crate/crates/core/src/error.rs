use thiserror::Error;

/// Failures reported by the library.
///
/// `Domain` covers inputs outside an operation's mathematical domain (even
/// moduli, primes where a composite is required, and so on). `Range` is for
/// inputs or intermediate values beyond the supported integer range.
/// `Usage` is reserved for malformed requests such as an inverted interval.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Range(String),
    #[error("{0}")]
    Usage(String),
    #[error("factorization timeout for {n}")]
    FactorizationTimeout { n: u64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
