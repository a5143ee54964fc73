use std::path::{Path, PathBuf};

/// Crate-wide error type.
///
/// The variants map onto the failure classes the CLI distinguishes:
/// invalid input or configuration, I/O, and numerical failure.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An invalid parameter combination, rejected before any pixel work.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A numerical procedure failed to converge or produced a non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// File I/O failure; always names the offending path.
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn io(path: impl AsRef<Path>, msg: impl ToString) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            message: msg.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
