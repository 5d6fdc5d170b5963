use crate::numeric::roots::RootError;

/// Errors raised by the probability, tilting, analytic and simulation layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("no closed-form cumulative hazard for {0}")]
    UnsupportedHazard(String),
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    #[error("tilted first moment is infinite: {0}")]
    NonFiniteMoment(String),
    #[error("second moment of the claim law is infinite: {0}")]
    SecondMomentInfinite(String),
    #[error("moment generating function unavailable: {0}")]
    MgfUnavailable(String),
    #[error("no root found: {0}")]
    NotFound(String),
    #[error("root bracketing failed: {0}")]
    NoBracket(#[from] RootError),
    #[error("target law does not share the model's support: {0}")]
    SupportMismatch(String),
    #[error("net profit condition violated: c·E[W] = {lhs} <= E[X] = {rhs}")]
    NetProfitViolated { lhs: f64, rhs: f64 },
    #[error("replication {index} exceeded the step cap of {max_steps}")]
    StepCapExceeded { index: u64, max_steps: u64 },
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
