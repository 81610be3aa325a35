use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate state: |sin(theta)| = {0:e} is below 1e-9")]
    DegenerateState(f64),
    #[error("invalid state amplitudes: {0}")]
    InvalidState(String),
    #[error("non-finite measurement angle {0}")]
    NonFiniteAngle(f64),
    #[error("detector model out of range: {0}")]
    ModelRange(String),
    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),
    #[error("no double-click coincidences for setting pair {0}")]
    NoCoincidences(String),
    #[error("closed-form CH value is only defined for beta = 0 (got {0})")]
    NoiseUnsupported(f64),
    #[error("no efficiency threshold: {0}")]
    NoThreshold(String),
    #[error("mixture weights invalid: {0}")]
    BadWeights(String),
    #[error("linear program did not converge: {0}")]
    Numerical(String),
    #[error("no violation anywhere in the search range: {0}")]
    NoViolationInRange(String),
    #[error("violation is not monotone along the bisection range: {0}")]
    NonMonotone(String),
    #[error("setting pair {0} has no trials")]
    EmptySetting(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
