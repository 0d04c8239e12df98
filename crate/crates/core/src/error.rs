use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    /// Malformed input: dangling ids, wrong vector lengths, bad index ranges.
    #[error("structural error at {path}: {message}")]
    Structural { path: String, message: String },
    #[error("no such section: divisor degree {divisor} differs from bundle degree {degree}")]
    DegreeMismatch { degree: i64, divisor: i64 },
    #[error("missing eta for edge {edge}, end {end}, coordinate {coord}")]
    MissingEta { edge: String, end: usize, coord: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("no decoration exists: {0}")]
    NoDecoration(String),
    #[error("instance too large: {size} exceeds the cap of {cap}")]
    SizeCap { size: usize, cap: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub fn structural(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Structural {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
