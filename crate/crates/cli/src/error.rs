use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config invalid: {0}")]
    ConfigInvalid(String),

    #[error("precondition: {0}")]
    Precondition(String),

    #[error(transparent)]
    Core(#[from] fracp_core::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code: 2 for configuration and precondition problems.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
