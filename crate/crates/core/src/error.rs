use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a power series needs at least one coefficient")]
    EmptySeries,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("exp({0}) is out of range")]
    ExpOverflow(f64),

    #[error("logarithm needs a positive constant term, got {0}")]
    NonPositiveConstant(f64),

    #[error("invalid batch rates: {0}")]
    InvalidRates(String),

    #[error("total rate {0} is too large: P(X = 0) underflows")]
    RateTooLarge(f64),

    #[error("generating function argument s = {0} lies outside [-1, 1]")]
    PgfDomain(f64),

    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),

    #[error("P(X = 0) = {0} must be positive for a log-generating-function expansion")]
    ZeroMassAtOrigin(f64),

    #[error("P(X = 0) = {0} does not exceed 0.5; the signed representation is not guaranteed")]
    OriginMassTooSmall(f64),

    #[error("the law is a point mass at 0: all batch rates vanish")]
    ZeroRate,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("order-{order} Vandermonde system is ill-conditioned (relative residual {residual:e})")]
    IllConditioned { order: usize, residual: f64 },

    #[error("data are not overdispersed (mean {mean}, variance {variance}); negative binomial fit inapplicable")]
    NotOverdispersed { mean: f64, variance: f64 },

    #[error("expected count {expected} in bin {bin} is not positive; merge bins first")]
    DegenerateExpected { bin: usize, expected: f64 },

    #[error("length mismatch: {0} observed vs {1} expected bins")]
    LengthMismatch(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
