use thiserror::Error;

/// Unified error type for the crate.
///
/// `Domain` covers precondition violations on otherwise well-formed inputs
/// (non-positive power, frequency out of range). `Config` covers malformed
/// run configuration and names every offending key. `TouchstoneParse`
/// carries the 1-based line number of the first unparseable line.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("touchstone parse error at line {line}: {message}")]
    TouchstoneParse { line: usize, message: String },

    #[error("measurement error: {0}")]
    Measurement(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn measurement(msg: impl Into<String>) -> Self {
        Error::Measurement(msg.into())
    }

    /// Stable process exit code per category, used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 2,
            Error::Config(_) => 3,
            Error::TouchstoneParse { .. } => 4,
            Error::Measurement(_) => 5,
            Error::Io(_) => 6,
            Error::Json(_) => 7,
        }
    }
}
