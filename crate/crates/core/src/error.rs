use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `|σ + Σ λ_k|` fell below the solver's singularity threshold.
    #[error("singular shifted operator at mode {mode:?} (|multiplier| = {magnitude:e})")]
    SingularMode { mode: Vec<usize>, magnitude: f64 },

    #[error("non-finite value in the state after step {step}")]
    Divergence { step: usize },

    #[error("step {step}: scheme residual {residual:e} exceeds {tolerance:e}")]
    Residual {
        step: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
