use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid metric matrix: {0}")]
    InvalidMatrix(String),
    #[error("no {eps}-chain joins {source_id} to {target}")]
    Unreachable {
        source_id: usize,
        target: usize,
        eps: f64,
    },
    #[error("unknown landmark `{0}`")]
    UnknownLandmark(String),
    #[error("point is not addressable by the oracle: {0}")]
    NotAddressable(String),
    #[error("ill-formed gluing: {0}")]
    IllFormedGluing(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
