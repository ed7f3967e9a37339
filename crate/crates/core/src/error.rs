use thiserror::Error;

/// Errors raised by the state, channel, ESD and oracle routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("covariance matrix is not physical: {0}")]
    NonPhysicalCm(String),

    #[error("parameter extraction out of domain: {0}")]
    ExtractionOutOfDomain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("bisection did not converge within {iterations} iterations")]
    BudgetExceeded { iterations: usize },

    #[error("Fock cutoff {cutoff} insufficient: tail population {tail:e}")]
    CutoffInsufficient { cutoff: usize, tail: f64 },

    #[error("integration step {dt} too large: halving changed moments by {change:e}")]
    StepTooLarge { dt: f64, change: f64 },

    #[error("expectation value has imaginary part {0:e}")]
    NonNegligibleImaginaryPart(f64),

    #[error("density matrix invariant violated: {0}")]
    InvariantViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
