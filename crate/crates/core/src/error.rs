use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge after {evaluations} evaluations (estimate {value:e} +/- {error_estimate:e})")]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("denominator does not change sign on [{a}, {b}]")]
    PoleNotBracketed { a: f64, b: f64 },

    #[error("denominator slope {slope:e} at pole {pole} is too small")]
    DegeneratePole { pole: f64, slope: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
