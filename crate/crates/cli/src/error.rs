use std::path::PathBuf;

use thiserror::Error;

use crate::config::Violation;

#[derive(Error, Debug)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("config does not parse: {0}")]
    Parse(String),

    #[error("invalid config:\n{}", list(.0))]
    Invalid(Vec<Violation>),

    #[error("{context}: {source}")]
    Core {
        context: String,
        source: orthosim_core::Error,
    },

    #[error("writing {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

fn list(v: &[Violation]) -> String {
    v.iter().map(|x| format!("  - {x}")).collect::<Vec<_>>().join("\n")
}

/// Attaches a description of the failing step to core errors.
pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError>;
}

impl<T> Context<T> for orthosim_core::Result<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core {
            context: what.into(),
            source,
        })
    }
}
