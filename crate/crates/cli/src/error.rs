use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        source: adoption_index::Error,
    },

    #[error(transparent)]
    Core(#[from] adoption_index::Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn in_file(path: &Path, source: adoption_index::Error) -> Self {
        CliError::InFile {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn core(&self) -> Option<&adoption_index::Error> {
        match self {
            CliError::InFile { source, .. } | CliError::Core(source) => Some(source),
            _ => None,
        }
    }

    /// 1 when the data are valid but a statistic is undefined, 2 for bad
    /// input.
    pub fn exit_code(&self) -> i32 {
        match self.core() {
            Some(e) if e.is_statistical_refusal() => 1,
            _ => 2,
        }
    }
}
