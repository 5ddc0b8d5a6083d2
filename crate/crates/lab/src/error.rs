use std::path::PathBuf;

/// Input and usage errors. All of them map to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),
    #[error("metric file: {0}")]
    MetricFile(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] randers_core::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

pub(crate) fn usage(msg: impl Into<String>) -> LabError {
    LabError::Usage(msg.into())
}
