use std::io;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] wavetrace_core::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("oracle precondition violated: {0}")]
    Oracle(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("cache file is malformed: {0}")]
    Cache(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
