use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{}:{line}: unknown {kind} '{name}'", path.display())]
    Unknown { path: PathBuf, line: usize, kind: &'static str, name: String },

    #[error("{}: {message}", path.display())]
    Checkpoint { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] kbc_core::Error),
}

impl FormatError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        FormatError::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        FormatError::Parse { path: path.into(), line, message: message.into() }
    }
}

pub type Result<T, E = FormatError> = std::result::Result<T, E>;
