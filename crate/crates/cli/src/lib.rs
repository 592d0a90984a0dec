//! Scenario runner behind the `hbd` binary.

pub mod config;
pub mod run;
pub mod suites;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ASSERTION_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const IO: i32 = 3;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => exit::CONFIG,
            CliError::Compute(_) => exit::ASSERTION_FAILED,
            CliError::Io(_) => exit::IO,
        }
    }
}
