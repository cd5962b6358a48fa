use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("exponents must be positive")]
    NonPositiveExponent,
    #[error("cyclic order {0} must be at least 2")]
    InvalidOrder(u64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("element and endomorphism belong to different groups")]
    GroupMismatch,
    #[error("matrix is not an endomorphism: p^{shift} does not divide entry ({row}, {col})")]
    InvalidEndo { row: usize, col: usize, shift: u32 },
    #[error("{value} is not coprime to {p}")]
    NotCoprime { value: i64, p: u64 },
    #[error("generators span a lattice of rank less than {0}")]
    RankDeficient(usize),
    #[error("depth vector does not define a characteristic subgroup")]
    NotCharacteristic,
    #[error("depth {depth} equals the exponent at index {index}")]
    FullDepth { index: usize, depth: u32 },
    #[error("depth {depth} at index {index} exceeds exponent {exponent}")]
    OutOfRange {
        index: usize,
        depth: u32,
        exponent: u32,
    },
    #[error("matrix does not represent an automorphism")]
    NotAutomorphism,
    #[error("operation requires {expected}, got p = {p}")]
    WrongPrime { p: u64, expected: &'static str },
    #[error("{0} is not in the spectrum")]
    OutOfSpectrum(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
