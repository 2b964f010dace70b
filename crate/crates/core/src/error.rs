use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Raised by the iterated quadrupling map when the base is not positive.
    #[error("undefined iterate: f({t}) = {value} is not positive")]
    UndefinedIterate { t: f64, value: f64 },

    #[error("data error at row {row}: {message}")]
    Data { row: usize, message: String },

    #[error("data error: {0}")]
    DataSet(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
