use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A model or coupling description is incomplete or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
    /// An approximation was asked for outside its range of validity.
    #[error("validity error: {0}")]
    Validity(String),
    /// A scenario or run description violates its invariants.
    #[error("validation error: {0}")]
    Validation(String),
    /// Non-finite values or step-size underflow during integration.
    #[error("numerical failure at tau = {tau:e} s (dt = {dt:e} s): {message}")]
    Numerical { tau: f64, dt: f64, message: String },
    /// Non-finite source term during the spatial march.
    #[error("numerical failure at grid index {index}: {message}")]
    NonFiniteSource { index: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
