use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: no terms", .0.display())]
    NoTerms(PathBuf),

    #[error("{}: gold standard has no pairs", .0.display())]
    EmptyGold(PathBuf),

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("unsupported stats file version {found} (expected {expected})")]
    Version { found: String, expected: u32 },

    #[error("stats file checksum mismatch: file says {stored}, content hashes to {computed}")]
    Checksum { stored: String, computed: String },

    #[error("catalog fingerprint mismatch: {left} vs {right}")]
    Fingerprint { left: String, right: String },

    #[error("{0}")]
    Input(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    /// Process exit code: 2 for bad input, 3 for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}
