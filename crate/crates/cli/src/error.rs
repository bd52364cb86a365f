use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{context}: {message}")]
    Input { context: String, message: String },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: gdpcast_core::Error,
    },
    #[error("{context}: {message} (run `fetch` with `offline true` to use the bundled fixture)")]
    Network { context: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn input(context: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Input {
            context: context.into(),
            message: message.into(),
        }
    }

    pub fn network(context: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Network {
            context: context.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } | CliError::Io { .. } => 2,
            CliError::Core { source, .. } if source.is_input() => 2,
            CliError::Core { .. } => 3,
            CliError::Network { .. } => 4,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Attach `module::operation` context to core errors.
pub trait Context<T> {
    fn context(self, what: &str) -> CliResult<T>;
}

impl<T> Context<T> for gdpcast_core::Result<T> {
    fn context(self, what: &str) -> CliResult<T> {
        self.map_err(|source| CliError::Core {
            context: what.to_string(),
            source,
        })
    }
}
