//! Command-line front end for `varorbit`: configuration, runs, reports and
//! plots. The binary in `main.rs` only parses arguments and maps errors to
//! exit codes.

pub mod commands;
pub mod config;
pub mod output;
pub mod plot;
pub mod run;

/// Failure classes, each with its own exit code.
#[derive(Debug, Clone, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("run failed: {0}")]
    Run(String),
}

impl CliError {
    /// 2 for configuration, 3 for I/O, 1 for a run or check failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Run(_) => 1,
        }
    }
}
