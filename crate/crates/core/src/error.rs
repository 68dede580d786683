use thiserror::Error;

/// Errors produced by the completion library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {0} is required but unspecified")]
    MissingIndex(usize),
    #[error("offset {0} must be even")]
    BadOffset(usize),
    #[error("order {order} exceeds the cap of {cap}")]
    OrderTooLarge { order: usize, cap: usize },
    #[error("entry at index {0} is not finite")]
    NonFiniteEntry(usize),
    #[error("leading block of size {0} is singular")]
    SingularBlock(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("not partial positive definite: {0}")]
    NotPartialPd(String),
    #[error("unsupported pattern: {0}")]
    UnsupportedPattern(String),
    #[error("moment overflow at index {0}")]
    Overflow(usize),
    #[error("not a positive sequence: {0}")]
    NotPositive(String),
    #[error("factorization pivot ratio {0:e} too large")]
    IllConditioned(f64),
    #[error("recovered atom {0} is not positive")]
    StieltjesViolation(f64),
    #[error("sequence is not geometric at index {0}")]
    NotGeometric(usize),
    #[error("no admissible epsilon above {0:e}")]
    EpsilonUnderflow(f64),
    #[error("expected exactly one missing index, found {0}")]
    NotSingleMissing(usize),
    #[error("{0} missing indices exceed the search cap")]
    TooManyMissing(usize),
    #[error("atom at zero cannot carry weight under an offset of {0}")]
    ZeroAtomWithOffset(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingIndex(_) => "MissingIndex",
            Error::BadOffset(_) => "BadOffset",
            Error::OrderTooLarge { .. } => "OrderTooLarge",
            Error::NonFiniteEntry(_) => "NonFiniteEntry",
            Error::SingularBlock(_) => "SingularBlock",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::NotPartialPd(_) => "NotPartialPD",
            Error::UnsupportedPattern(_) => "UnsupportedPattern",
            Error::Overflow(_) => "Overflow",
            Error::NotPositive(_) => "NotPositive",
            Error::IllConditioned(_) => "IllConditioned",
            Error::StieltjesViolation(_) => "StieltjesViolation",
            Error::NotGeometric(_) => "NotGeometric",
            Error::EpsilonUnderflow(_) => "EpsilonUnderflow",
            Error::NotSingleMissing(_) => "NotSingleMissing",
            Error::TooManyMissing(_) => "TooManyMissing",
            Error::ZeroAtomWithOffset(_) => "ZeroAtomWithOffset",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// True when the error states a mathematical impossibility rather than bad input.
    pub fn is_negative_answer(&self) -> bool {
        matches!(
            self,
            Error::NotPartialPd(_)
                | Error::NotPositive(_)
                | Error::StieltjesViolation(_)
                | Error::NotGeometric(_)
                | Error::ZeroAtomWithOffset(_)
                | Error::EpsilonUnderflow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
