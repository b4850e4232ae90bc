use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence after {iterations} iterations/subdivisions (error estimate {err_est:e})")]
    NonConvergence { iterations: usize, err_est: f64 },

    #[error("bracket [{lo}, {hi}] does not contain a sign change of the derivative")]
    Bracket { lo: f64, hi: f64 },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("size {requested} exceeds the cap of {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("dimension {requested} exceeds the supported maximum {max}")]
    DimensionCap { requested: usize, max: usize },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
