use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("divisor is not monic")]
    NonMonicDivisor,

    #[error("problem size exceeds guard: {what} = {value} > {limit}")]
    SizeExceeded {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("p-boundedness certification failed at t = {t} (lhs {lhs}, rhs {rhs})")]
    CertificationFailure { t: f64, lhs: f64, rhs: f64 },

    #[error("root finder did not converge for degree {degree} after precision escalation")]
    NoConvergence { degree: usize },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("recombination would test {subsets} subsets (limit 2^24)")]
    DegreeTooLarge { subsets: u64 },

    #[error("coefficient model out of range: {0}")]
    ModelOutOfRange(String),

    #[error("no prime in the Bertrand window [{lo}, {hi}]")]
    WindowEmpty { lo: u64, hi: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}
