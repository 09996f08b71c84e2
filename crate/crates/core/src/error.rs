use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("group {group} has {count} observations, at least {min} are required")]
    GroupTooSmall { group: usize, count: usize, min: usize },

    #[error("at least {min} groups are required, found {found}")]
    TooFewGroups { min: usize, found: usize },

    #[error("{what} of size {size} exceeds the guard limit {limit}")]
    GuardExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The assembled variance estimate was not strictly positive.
    #[error("degenerate variance estimate: {0}")]
    DegenerateVariance(f64),

    #[error("matrix is not positive definite (pivot {pivot} is {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("relative efficiency is undefined when all means are equal")]
    UndefinedEfficiency,

    #[error("weights must have a constant alpha vector")]
    NonConstantAlpha,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by malformed input text rather than by
    /// well-formed but invalid values.
    pub fn is_parse(&self) -> bool {
        match self {
            Error::Parse(_) | Error::Io(_) | Error::Csv(_) => true,
            // Unknown keys and bad enum tags are data errors: validation failures.
            Error::Json(e) => !e.is_data(),
            _ => false,
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
