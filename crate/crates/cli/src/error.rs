//! Error type shared by every subcommand, split by exit code.

use std::fmt::Display;

/// What a command can fail with. Configuration problems (bad scenario
/// files, bad flags, refusal to overwrite) exit with code 2; runtime and
/// invariant failures exit with code 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime failure: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Shorthand for a configuration error (exit code 2).
pub fn config(msg: impl Display) -> CliError {
    CliError::Config(msg.to_string())
}

/// Shorthand for a runtime failure (exit code 3).
pub fn runtime(msg: impl Display) -> CliError {
    CliError::Runtime(msg.to_string())
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Runtime(format!("i/o: {e}"))
    }
}
