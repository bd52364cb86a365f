//! Quarterly time-series models for national-accounts forecasting:
//! Holt–Winters smoothing, seasonal ARIMA, and a Bayesian dynamic linear
//! model, with shared accuracy metrics and diagnostics.

pub mod accounting;
pub mod correlogram;
pub mod dlm;
mod error;
pub mod holt_winters;
pub mod hypothesis;
pub mod metrics;
pub mod optim;
pub mod sarima;
pub mod series;
pub mod transform;

pub use error::{Error, Result};
pub use series::{Period, TimeSeries};
