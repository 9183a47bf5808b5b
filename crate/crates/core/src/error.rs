use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear minimization oracle is undefined for a zero gradient")]
    ZeroGradient,

    #[error("combined smoothness constant is zero")]
    DegenerateConstant,

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("solver requires parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("inner loop hit the cap of {cap} checks at iteration {iter} without acceptance")]
    InnerLoopCap { iter: usize, cap: usize },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("instance {instance} / solver {solver}: {source}")]
    Run {
        instance: String,
        solver: String,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed {what} at {path}: {msg}")]
    Malformed {
        what: &'static str,
        path: PathBuf,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
