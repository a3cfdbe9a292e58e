use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,

    #[error("basis is rank deficient")]
    RankDeficient,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero vector where a nonzero one is required")]
    ZeroVector,

    #[error("point does not lie on stratum {stratum}")]
    PointNotOnStratum { stratum: String },

    #[error("defining equations of stratum {stratum} are singular at the point")]
    SingularPoint { stratum: String },

    #[error("distance oracle cannot decide: {0}")]
    OracleIndeterminate(String),

    #[error("unknown catalog entry {0:?}")]
    UnknownCatalogEntry(String),

    #[error("point leaves the base of stratum {level} of the sequence")]
    OutsideBase { level: usize },

    #[error("sample pair {index} is outside the ball")]
    OutsideBall { index: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
