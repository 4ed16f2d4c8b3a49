use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("field order {p}^{m} exceeds 2^16")]
    FieldTooLarge { p: u32, m: u32 },
    #[error("zero has no multiplicative inverse")]
    InvertZero,
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid rate: {0}")]
    InvalidRate(String),
    #[error("enumeration of {} items exceeds cap {cap}", count(*needed))]
    EnumerationTooLarge { needed: u128, cap: u128 },
    #[error("search over {} candidates exceeds budget {budget}", count(*needed))]
    SearchTooLarge { needed: u128, budget: u128 },
    #[error("message set is empty")]
    EmptyLambda,
    #[error("list size {ell} exceeds field size {q}")]
    EllExceedsField { ell: usize, q: u32 },
    #[error("duplicate vector at position {0}")]
    DuplicateVector(usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

// Counts saturate at u128::MAX when they overflow.
fn count(n: u128) -> String {
    if n == u128::MAX { "more than 2^128".into() } else { n.to_string() }
}
