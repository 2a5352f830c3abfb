use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are grouped so that front ends can map each class to a
/// distinct exit status (see [`Error::class`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("probability vector is empty")]
    EmptyInput,

    #[error("probability at index {index} is {value}, outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("probability at index {index} is zero; the recursion identity divides by it")]
    ZeroProbability { index: usize },

    #[error("input too large: {what} = {value} exceeds limit {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("quantile function is not Lipschitz: density infimum {infimum:e} is not positive")]
    NotLipschitz { infimum: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("row {row}: {message}")]
    Data { row: usize, message: String },

    #[error("no records")]
    NoRecords,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse error classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad argument values or unparsable specs.
    Invalid,
    /// A theorem's hypotheses do not hold for the requested inputs.
    Hypothesis,
    /// Malformed data files or I/O failures.
    Data,
    /// Quadrature or DP failure.
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::EmptyInput
            | Error::InvalidProbability { .. }
            | Error::IndexOutOfRange { .. }
            | Error::ZeroProbability { .. }
            | Error::TooLarge { .. }
            | Error::InvalidParameter(_)
            | Error::Parse { .. } => ErrorClass::Invalid,
            Error::HypothesisViolated(_) | Error::NotLipschitz { .. } => ErrorClass::Hypothesis,
            Error::Data { .. } | Error::NoRecords | Error::Io(_) => ErrorClass::Data,
            Error::Numerical(_) => ErrorClass::Numerical,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
