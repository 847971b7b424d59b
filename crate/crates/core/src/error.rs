use thiserror::Error;

use crate::verify::Pattern;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty permutation: modulus must be at least 1")]
    EmptyPermutation,
    #[error("modulus {0} exceeds the supported maximum {max}", max = crate::perm::MAX_MODULUS)]
    ModulusTooLarge(u64),
    #[error("image {value} at index {index} is out of range for modulus {modulus}")]
    ImageOutOfRange { index: usize, value: i64, modulus: usize },
    #[error("duplicate image {value} at index {index}")]
    DuplicateImage { index: usize, value: u64 },
    #[error("{value} is not invertible modulo {modulus} (gcd {gcd})")]
    NotCoprime { value: i64, modulus: u64, gcd: u64 },
    #[error("modulus mismatch: expected {expected}, got {actual}{}", component.map(|c| format!(" (component {c})")).unwrap_or_default())]
    ModulusMismatch { expected: usize, actual: usize, component: Option<usize> },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("claim {pattern} failed verification for {label}")]
    ClaimFailed { label: String, pattern: Pattern },
    #[error("invalid CRT basis: {0}")]
    InvalidBasis(String),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
