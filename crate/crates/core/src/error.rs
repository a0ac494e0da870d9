use crate::Int;

/// Errors raised by the library. Verdict-style failures (a flagged
/// counterexample, a failed certificate step) are returned as data, not as
/// errors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: Int, m: Int },
    #[error("{a} and {m} are not coprime")]
    NotCoprime { a: Int, m: Int },
    #[error("cannot factor {0}: cofactor outside the supported range")]
    FactorizationFailed(Int),
    #[error("{what} exceeds the enumeration guard ({size} > {guard})")]
    TooLarge {
        what: &'static str,
        size: u128,
        guard: u128,
    },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("{0} is outside the certified primality range [0, 2^64)")]
    OutOfRange(Int),
    #[error("bad prime {p}: {reason}")]
    BadPrime { p: Int, reason: &'static str },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Stable name of the variant, used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::NotInvertible { .. } => "NotInvertible",
            Error::NotCoprime { .. } => "NotCoprime",
            Error::FactorizationFailed(_) => "FactorizationFailed",
            Error::TooLarge { .. } => "TooLarge",
            Error::Overflow(_) => "Overflow",
            Error::OutOfRange(_) => "OutOfRange",
            Error::BadPrime { .. } => "BadPrime",
            Error::NotFound(_) => "NotFound",
            Error::Invariant(_) => "Invariant",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
