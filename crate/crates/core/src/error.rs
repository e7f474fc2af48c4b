use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A lattice scan would visit more points than the configured cap.
    #[error("scan volume {volume:.3e} exceeds the limit {limit:.3e}")]
    Resource { volume: f64, limit: f64 },

    /// Simultaneous root iteration did not converge. Carries the best
    /// approximations found.
    #[error("root finder did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        partial: Vec<(f64, f64)>,
    },

    /// The integrand produced a NaN.
    #[error("integrand evaluation failed at {0:?}")]
    Evaluation(Vec<f64>),

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
