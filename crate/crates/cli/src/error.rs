use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Core(#[from] cuspkit::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        use cuspkit::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                E::InvalidParameter(_)
                | E::NonPositiveCuspConstant(_)
                | E::CutoffBelowAlpha { .. }
                | E::CutoffMismatch { .. }
                | E::InvalidGrid(_)
                | E::GridMismatch
                | E::InvalidRange { .. }
                | E::DegenerateDivisor
                | E::DegreeTooSmall(_)
                | E::TooFewSamples { .. }
                | E::Parse(_) => 2,
                _ => 3,
            },
        }
    }
}

pub fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
