use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid series: {0}")]
    Series(String),

    /// `1 + rate` is not strictly positive somewhere on the interval.
    #[error("rate domain error: 1 + rate <= 0 at t = {at}")]
    RateDomain { at: f64 },

    /// The integrand was not finite at an evaluation node.
    #[error("integrand not finite at x = {at}")]
    IntegrandDomain { at: f64 },

    #[error("tolerance not reached: best estimate {estimate} with error estimate {error_estimate}")]
    Accuracy { estimate: f64, error_estimate: f64 },

    #[error("model is not positive at t = {at} (value {value})")]
    Positivity { at: f64, value: f64 },

    #[error("basis function {name} cannot be evaluated at t = {at}")]
    Basis { name: String, at: f64 },

    #[error("no feasible starting point: 1 + rate <= 0 at every simplex vertex")]
    InfeasibleStart,

    #[error("invalid fit report: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, Error>;
