//! Command-line front end: bounds, sweeps, oracle solves and consistency
//! suites, rendered as tables, CSV or JSON.

pub mod commands;
pub mod config;
pub mod report;
pub mod verify;

use thiserror::Error;

use config::{Cli, Command, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    match &cli.command {
        Command::Bound(args) => Ok(commands::cmd_bound(&RunConfig::from_args(args, true)?)),
        Command::Sweep(args) => Ok(commands::cmd_sweep(&RunConfig::from_args(args, true)?)),
        Command::Oracle(args) => Ok(commands::cmd_oracle(&RunConfig::from_args(args, false)?)),
        Command::Verify(args) => commands::cmd_verify(args),
    }
}
