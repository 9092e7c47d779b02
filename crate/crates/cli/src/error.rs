use nilnorm::cgc::CgcError;
use nilnorm::sl2rep::Sl2Error;
use nilnorm::{LieError, NormalFormError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Cgc(#[from] CgcError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Orbit(#[from] Sl2Error),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON input: {0}")]
    Json(#[from] serde_json::Error),
    /// A library result contradicted one of its own checks.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 2,
            _ => 1,
        }
    }
}
