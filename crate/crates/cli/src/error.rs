use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, flag or input contents.
    Config(String),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    NonConvergence(String),
    Core(cete_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Io { .. } => ExitCode::from(3),
            CliError::NonConvergence(_) => ExitCode::from(4),
            CliError::Core(_) => ExitCode::from(1),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::NonConvergence(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cete_core::Error> for CliError {
    fn from(e: cete_core::Error) -> Self {
        use cete_core::Error as E;
        match e {
            E::NonConvergence { .. } => CliError::NonConvergence(e.to_string()),
            E::InvalidParameter(_)
            | E::InvalidLabel { .. }
            | E::Fcidump { .. }
            | E::NonHermitianIntegrals { .. }
            | E::TooLarge { .. } => CliError::Config(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
