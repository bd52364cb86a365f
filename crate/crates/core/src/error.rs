use thiserror::Error;

/// Errors produced by the modelling library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or insufficient input (lengths, orders, missing fields, CSV shape).
    #[error("input error: {0}")]
    Input(String),
    /// A value outside the domain of a transform or metric.
    #[error("domain error at index {index}: {message}")]
    Domain { index: usize, message: String },
    /// The series has zero variance where a correlogram is requested.
    #[error("degenerate variance: series is constant")]
    DegenerateVariance,
    /// A one-step forecast variance collapsed to zero with a non-zero innovation.
    #[error("degenerate forecast variance {variance:e} at t = {t}")]
    DegenerateForecastVariance { t: usize, variance: f64 },
    /// Numerical breakdown (non-finite sums of squares, failed factorizations).
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A model violates its structural invariants (non-stationary, non-invertible).
    #[error("model error: {0}")]
    Model(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(index: usize, msg: impl Into<String>) -> Self {
        Error::Domain {
            index,
            message: msg.into(),
        }
    }

    /// True for errors caused by the caller's data or configuration rather
    /// than by a numerical failure inside a routine.
    pub fn is_input(&self) -> bool {
        matches!(self, Error::Input(_) | Error::Domain { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
