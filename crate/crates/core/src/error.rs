use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WdlError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("singular Weierstrass equation (discriminant is zero)")]
    Singular,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("box of cardinality {size} exceeds the enumeration limit {limit}")]
    BoxTooLarge { size: String, limit: u64 },
}

pub type Result<T> = std::result::Result<T, WdlError>;

/// Fails with [`WdlError::NotPrime`] unless `p` is prime.
pub fn require_prime(p: u64) -> Result<()> {
    if crate::padic::is_prime(p) {
        Ok(())
    } else {
        Err(WdlError::NotPrime(p))
    }
}
