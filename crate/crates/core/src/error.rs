use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point index {index} out of range for a {size}-point space")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("point kind does not match the space ({0})")]
    PointKind(&'static str),

    #[error("non-finite coordinate in point")]
    NonFinite,

    #[error("malformed distance matrix: {0}")]
    MalformedMatrix(String),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("levels must start at alpha = 1.0, found {0}")]
    MissingTopLevel(f64),

    #[error("level {0} outside (0, 1]")]
    LevelOutOfRange(f64),

    #[error("levels not strictly decreasing: {upper} followed by {lower}")]
    LevelOrder { upper: f64, lower: f64 },

    #[error("cuts not nested: cut at {upper} is not contained in cut at {lower}")]
    NotNested { upper: f64, lower: f64 },

    #[error("alpha {0} is a platform point of the limit")]
    PlatformCollision(f64),

    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
