use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{stage}: {source}")]
    Numerical {
        stage: &'static str,
        #[source]
        source: fracinv::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    /// A check suite ran to completion but at least one check failed.
    #[error("{failed} check(s) failed")]
    ChecksFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical { .. } | CliError::ChecksFailed { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

/// Tags a library error with the pipeline stage it came from.
pub(crate) trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError>;
}

impl<T> Stage<T> for fracinv::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numerical { stage, source })
    }
}
