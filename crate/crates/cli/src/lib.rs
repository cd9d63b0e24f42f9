//! Experiment harness for the rfrk time-integration library: configuration
//! handling, single runs with CSV artifacts, convergence tables, reproduction
//! targets with golden checks, and stability reports.

pub mod artifacts;
pub mod config;
pub mod converge;
pub mod reproduce;
pub mod runner;
pub mod stability_cmd;

use thiserror::Error;

/// Process exit codes: 0 success, 1 config error, 2 integration failure,
/// 3 golden-check failure.
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INTEGRATION: i32 = 2;
pub const EXIT_GOLDEN: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("integration failed: {0}")]
    Integration(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Integration(_) => EXIT_INTEGRATION,
        }
    }
}
