use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, arguments or input files.
    #[error("config: {0}")]
    Config(String),
    /// A solver, transport or I/O failure while working.
    #[error("{0}")]
    Runtime(String),
    /// A report did not survive re-checking.
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::Verify(_) => 4,
        })
    }
}

pub fn config(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

pub fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

pub type CliResult<T> = Result<T, CliError>;
