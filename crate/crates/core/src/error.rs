use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("differentials do not compose to zero")]
    NotComposable,
    #[error("index function exceeds height at column {column}: level {level} > {height}")]
    HeightExceeded {
        column: usize,
        level: usize,
        height: usize,
    },
    #[error("index {lower} is not below {upper}")]
    NotBelow { lower: String, upper: String },
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("degree {degree} out of range (complex has degrees 0..={max})")]
    DegreeOutOfRange { degree: usize, max: usize },
    #[error("{0}")]
    Hypothesis(String),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
