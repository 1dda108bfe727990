//! Config parsing and experiment dispatch behind the `cqnls` binary.

pub mod config;
pub mod dispatch;
mod ini;

use serde::Serialize;
use thiserror::Error;

pub use config::{resolve, Experiment, Overrides, RunConfig};
pub use dispatch::{dispatch, Outcome};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}{}: {message}", key.as_deref().map(|k| format!(" (key `{k}`)")).unwrap_or_default())]
    Parse { line: usize, key: Option<String>, message: String },

    #[error("`{key}` = {value} violates {precondition}")]
    Validation { key: String, precondition: String, value: String },
}

impl ConfigError {
    pub(crate) fn parse(line: usize, key: Option<&str>, message: String) -> Self {
        Self::Parse { line, key: key.map(str::to_string), message }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Run(#[from] cqnls::Error),

    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io { context: context.into(), source }
    }
}

/// Machine-readable form of a failure, printed to stderr as one JSON line.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    pub exit_code: i32,
}

impl From<&CliError> for ErrorRecord {
    fn from(err: &CliError) -> Self {
        let (error, line, key) = match err {
            CliError::Config(ConfigError::Parse { line, key, .. }) => ("ConfigParseError", Some(*line), key.clone()),
            CliError::Config(ConfigError::Validation { key, .. }) => ("ConfigValidationError", None, Some(key.clone())),
            CliError::Run(_) => ("RunError", None, None),
            CliError::Io { .. } => ("IoError", None, None),
        };
        Self { error, message: err.to_string(), line, key, exit_code: 1 }
    }
}
