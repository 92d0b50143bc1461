use std::path::PathBuf;

use magtele::entanglement::EntanglementError;
use magtele::params::ParamError;
use magtele::states::StateError;
use magtele::teleport::TeleportError;
use magtele::wigner::WignerError;
use thiserror::Error;

/// Errors surfaced by the command-line front end. Each maps to a fixed
/// process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("numerical guard: {0}")]
    Guard(String),
    #[error("unexpected oracle discrepancy: {0}")]
    Discrepancy(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Guard(_) => 2,
            CliError::Discrepancy(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Wraps a numerical failure with the sweep point it came from.
    pub fn guard_at(context: &str, err: impl std::fmt::Display) -> Self {
        CliError::Guard(format!("{context}: {err}"))
    }
}

macro_rules! guard_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Guard(e.to_string())
            }
        }
    )*};
}

guard_from!(ParamError, StateError, TeleportError, EntanglementError, WignerError);

pub type Result<T> = std::result::Result<T, CliError>;
