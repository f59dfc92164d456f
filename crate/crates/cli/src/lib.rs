//! Command-line front end: run configuration, result export and subcommands.

pub mod app;
pub mod config;
pub mod error;
pub mod export;

pub use app::run_cli;
pub use config::{Format, RunConfig};
pub use error::CliError;
