use std::fmt;
use std::path::Path;

use stratlab::LabError;

use crate::config::ConfigError;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    /// A library error with the module it came from.
    Lab {
        module: &'static str,
        source: LabError,
    },
    Io(String),
    /// `report` found failing rows.
    Failed(usize),
}

impl CliError {
    pub fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Lab { module, source } => write!(f, "[{module}] {source}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Failed(n) => write!(f, "{n} acceptance check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

/// `.lab("module")?` tags a library error with its origin.
pub trait LabContext<T> {
    fn lab(self, module: &'static str) -> Result<T, CliError>;
}

impl<T> LabContext<T> for stratlab::Result<T> {
    fn lab(self, module: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Lab { module, source })
    }
}
