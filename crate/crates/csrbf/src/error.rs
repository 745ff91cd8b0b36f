use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}:{line}: {message}", path.display())]
    Csv { path: PathBuf, line: u64, message: String },

    #[error("{}: duplicate point on lines {first} and {second}", path.display())]
    DuplicatePoint { path: PathBuf, first: u64, second: u64 },

    #[error("{}: model schema v{version}: {message}", path.display())]
    ModelSchema {
        path: PathBuf,
        version: u32,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] csrbf_core::Error),
}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const INPUT: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => exit::USAGE,
            Error::Core(e) if e.is_numerical() => exit::NUMERICAL,
            Error::Core(csrbf_core::Error::InvalidConfiguration(_)) => exit::USAGE,
            Error::Core(_)
            | Error::Io { .. }
            | Error::Csv { .. }
            | Error::DuplicatePoint { .. }
            | Error::ModelSchema { .. } => exit::INPUT,
        }
    }
}
