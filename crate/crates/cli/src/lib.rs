//! Command-line harness for the appraisal engine: configuration loading,
//! the `salience`, `rank`, `explain`, `scenario` and `schemas` commands,
//! and the bundled case-study fixtures.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod schemas;

pub use args::Cli;
pub use commands::execute;
pub use error::{CliError, CliResult, EXIT_INPUT, EXIT_PIPELINE};
