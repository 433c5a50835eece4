use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("invalid conformal factor: {0}")]
    InvalidKahler(String),
    #[error("invalid settings: {0}")]
    InvalidSettings(String),
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
