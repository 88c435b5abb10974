use thiserror::Error;

use crate::degree::Multidegree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),
    #[error("{0} is not a prime modulus")]
    NotPrime(u32),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("regularity heuristic failed; last failing degree {last}")]
    RegularityFailed { last: Multidegree },
    #[error("corner complex is not exact at degree {degree} (index {index})")]
    NotExact { degree: Multidegree, index: i64 },
    #[error("window does not cover {0}")]
    Coverage(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero(_) => "division_by_zero",
            Error::NotPrime(_) => "not_prime",
            Error::Invalid(_) => "invalid",
            Error::Dimension(_) => "dimension",
            Error::RegularityFailed { .. } => "regularity_failed",
            Error::NotExact { .. } => "not_exact",
            Error::Coverage(_) => "coverage",
            Error::Range(_) => "range",
            Error::Parse(_) => "parse",
        }
    }

    /// Whether the error stems from bad input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NotPrime(_) | Error::Invalid(_) | Error::Parse(_) | Error::Dimension(_) | Error::Range(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
