//! Front end for the `monopsony-polar` binary: argument handling and the
//! artifacts each subcommand writes.

pub mod commands;
pub mod config;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numeric(#[from] monopsony_core::Error),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::CheckFailed(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

pub use commands::run;
pub use config::{Cli, RunConfig};
