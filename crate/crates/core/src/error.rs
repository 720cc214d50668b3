use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} must be positive, got {value} on {date}")]
    NonPositive {
        what: &'static str,
        date: NaiveDate,
        value: f64,
    },

    #[error("{what} needs at least {needed} observations, got {got}")]
    TooShort {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("degenerate series: {0}")]
    Degenerate(String),

    #[error("dates must be strictly increasing: {prev} followed by {next}")]
    UnorderedDates { prev: NaiveDate, next: NaiveDate },

    #[error("non-finite value at position {index} ({what})")]
    NonFinite { what: String, index: usize },

    #[error("series share no common dates")]
    EmptyIntersection,

    #[error("date {date} is outside the usable range {first}..{last}")]
    DateOutOfRange {
        date: NaiveDate,
        first: NaiveDate,
        last: NaiveDate,
    },

    #[error("design matrix is rank deficient (relative pivot {pivot:.3e})")]
    RankDeficient { pivot: f64 },

    #[error("invalid GARCH parameters: {0}")]
    InvalidParams(String),

    #[error("non-stationary: beta1 + beta2 = {persistence} >= 1")]
    NonStationary { persistence: f64 },

    #[error("{path}:{line}: {message}")]
    Csv {
        path: String,
        line: u64,
        message: String,
    },

    #[error("column `{column}` not found in {path}; available columns: {available}")]
    MissingColumn {
        path: String,
        column: String,
        available: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
