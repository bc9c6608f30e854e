use thiserror::Error;

/// Errors raised by the library. The CLI maps every variant to exit code 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("window length {n} exceeds the cap of {cap}")]
    CapExceeded { n: u64, cap: u64 },

    #[error("power iteration did not converge after {iterations} iterations (primal {primal}, dual {dual})")]
    NotConverged {
        iterations: usize,
        primal: f64,
        dual: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
