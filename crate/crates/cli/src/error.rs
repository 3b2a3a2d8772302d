use constrained_oscillator_core::Error as CoreError;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: CoreError,
    },
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(key: &str, message: String) -> Self {
        CliError::Config {
            key: key.to_string(),
            message,
        }
    }

    pub fn core(context: impl Into<String>, source: CoreError) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for configuration, 3 for numerical failure, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Core {
                source: CoreError::InvalidParameter { .. },
                ..
            } => 2,
            CliError::Core { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}
