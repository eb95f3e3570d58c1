use thiserror::Error;

/// Failures mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] sp4rep::Error),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Csv(#[from] csv::Error),
    #[error("output error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 3 for non-convergence, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(sp4rep::Error::TruncationNotConverged { .. }) => 3,
            _ => 2,
        }
    }
}
