use std::path::Path;

/// Stable process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const UNSAFE: i32 = 10;
    pub const UNCERTAIN: i32 = 11;
    pub const USAGE: i32 = 64;
    pub const MISSING_FILE: i32 = 66;
    pub const INTERNAL: i32 = 70;
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}: no such file")]
    MissingFile(String),
    #[error("{0}")]
    Internal(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => exit::USAGE,
            Failure::MissingFile(_) => exit::MISSING_FILE,
            Failure::Internal(_) => exit::INTERNAL,
        }
    }

    pub fn from_io(path: &Path, e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::NotFound {
            Failure::MissingFile(path.display().to_string())
        } else {
            Failure::Internal(format!("{}: {e}", path.display()))
        }
    }
}

impl From<mlpreach::Error> for Failure {
    /// Bad inputs are usage errors; only I/O on our own outputs is internal.
    fn from(e: mlpreach::Error) -> Self {
        match e {
            mlpreach::Error::Io(io) => Failure::Internal(io.to_string()),
            mlpreach::Error::NotContained { .. } => Failure::Internal(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}
