//! Configuration, artifact writers and the acceptance report behind the
//! `stratlab` binary.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod report;

pub use config::{parse_config, parse_config_file, ConfigError, Parsed, RunConfig};
pub use error::CliError;
