use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size limit exceeded: {what} = {value} (limit {limit})")]
    SizeLimit {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("incomplete table: {0}")]
    Incomplete(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("not biunitary (residual {residual:.3e})")]
    NotBiunitary { residual: f64 },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}
