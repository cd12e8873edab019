use thiserror::Error;

/// Errors raised across the workbench.
///
/// Variants are grouped by the exit code the command-line front end maps
/// them to; see [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("the zero polynomial has no denominator vector")]
    ZeroPolynomial,

    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quiver is of wild type; affine data is undefined")]
    WildType,

    #[error("enumeration budget exceeded: {what} needs more than {budget} candidates")]
    BudgetExceeded { what: String, budget: u64 },

    #[error("prime pool too small: need {needed} good primes, have {available}")]
    InsufficientPrimes { needed: usize, available: usize },

    #[error("inexact division in the Laurent ring")]
    InexactDivision,

    #[error("interpolation failure: {0}")]
    Interpolation(String),

    #[error("genericity certification failed: {0}")]
    Certification(String),

    #[error("canonical decomposition search exhausted: {0}")]
    SearchExhausted(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    /// Process exit code: 2 invalid input, 3 budget exceeded,
    /// 4 internal consistency failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::ZeroPolynomial
            | Error::InvalidQuiver(_)
            | Error::InvalidInput(_)
            | Error::WildType => 2,
            Error::BudgetExceeded { .. } | Error::InsufficientPrimes { .. } => 3,
            Error::InexactDivision
            | Error::Interpolation(_)
            | Error::Certification(_)
            | Error::SearchExhausted(_)
            | Error::Consistency(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
