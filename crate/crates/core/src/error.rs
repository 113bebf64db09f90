use thiserror::Error;

use crate::dyadic::DyadicCube;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("cube not representable: {0}")]
    CubeResolution(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("parameter domain violation: {0}")]
    ParameterDomain(String),

    #[error("incompatible scale windows: {0}")]
    IncompatibleWindows(String),

    #[error("atom construction failed: {0}")]
    AtomConstruction(String),

    #[error("decomposition failed at cube {cube}: {reason}")]
    Decomposition { cube: DyadicCube, reason: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
