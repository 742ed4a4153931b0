use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Everything needed to re-run one failing check by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproducer {
    pub check: String,
    pub details: Value,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrimeP(u64),
    #[error("polynomial is reducible modulo {0}")]
    ReduciblePolynomial(u64),
    #[error("p = {0} divides the index of Z[theta] in the maximal order")]
    IndexDivisibleByP(u64),
    #[error("ring length must be at least 1")]
    LengthZero,
    #[error("unsupported ring presentation: {0}")]
    UnsupportedPresentation(String),
    #[error("element is not a unit")]
    NotAUnit,
    #[error("level {level} outside [{min}, {max}]")]
    BadLevel { level: usize, min: usize, max: usize },
    #[error("determinant is not 1")]
    DetNotOne,
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("group of order {order} exceeds the limit {limit}")]
    GroupTooLarge { order: u128, limit: u128 },
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error("verification failure in {}", .0.check)]
    VerificationFailure(Box<Reproducer>),
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("unsupported field d = {0}")]
    UnsupportedField(i64),
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    #[error("gate violated: {0}")]
    GateViolated(String),
    #[error("zero ideal")]
    ZeroIdeal,
}

impl Error {
    pub fn verification(check: impl Into<String>, details: Value) -> Self {
        Error::VerificationFailure(Box::new(Reproducer { check: check.into(), details }))
    }

    pub fn bad_level(level: usize, min: usize, max: usize) -> Self {
        Error::BadLevel { level, min, max }
    }

    pub fn reproducer(&self) -> Option<&Reproducer> {
        match self {
            Error::VerificationFailure(r) => Some(r),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
