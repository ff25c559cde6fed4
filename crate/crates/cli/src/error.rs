use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config key `{key}`: {message}")]
    Key { key: String, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] logse_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("snapshot: {0}")]
    Snapshot(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn key(key: &str, message: impl Into<String>) -> Self {
        CliError::Key {
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// 2 for divergence or a failed step residual, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(logse_core::Error::Divergence { .. } | logse_core::Error::Residual { .. }) => 2,
            _ => 1,
        }
    }
}
