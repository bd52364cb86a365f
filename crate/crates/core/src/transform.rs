//! Scale transforms and (seasonal) differencing.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Elementwise natural log. Fails on the first non-positive value.
pub fn log_transform(s: &TimeSeries) -> Result<TimeSeries> {
    if let Some(i) = s.values().iter().position(|&v| v <= 0.0) {
        return Err(Error::domain(
            i,
            format!("log of non-positive value {}", s.values()[i]),
        ));
    }
    s.with_values(s.values().iter().map(|v| v.ln()).collect())
}

/// Elementwise exponential, the inverse of [`log_transform`].
pub fn exp_transform(s: &TimeSeries) -> Result<TimeSeries> {
    let values: Vec<f64> = s.values().iter().map(|v| v.exp()).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(i, "exp overflow"));
    }
    s.with_values(values)
}

fn lag_difference(x: &[f64], lag: usize) -> Vec<f64> {
    x.iter().skip(lag).zip(x).map(|(a, b)| a - b).collect()
}

/// One differencing stage: the lag and the leading values it consumed.
#[derive(Debug, Clone, PartialEq)]
struct Stage {
    lag: usize,
    head: Vec<f64>,
}

/// A differenced series together with everything needed to undo it.
#[derive(Debug, Clone, PartialEq)]
pub struct Differenced {
    pub series: TimeSeries,
    stages: Vec<Stage>,
    source: TimeSeries,
}

impl Differenced {
    /// Rebuild the original scale from a sequence on the differenced scale
    /// that starts at the same position as `self.series`.
    ///
    /// Passing `self.series.values()` reproduces the source exactly.
    pub fn integrate(&self, diffed: &[f64]) -> Vec<f64> {
        let mut x = diffed.to_vec();
        for stage in self.stages.iter().rev() {
            let mut out = stage.head.clone();
            out.reserve(x.len());
            for (i, z) in x.iter().enumerate() {
                let prev = out[i];
                out.push(z + prev);
            }
            x = out;
        }
        x
    }

    /// The undifferenced series this was built from.
    pub fn source(&self) -> &TimeSeries {
        &self.source
    }
}

/// Apply `d` first differences then `seasonal_d` differences at `lag`,
/// keeping the initial values for integration.
pub fn difference_with_history(
    s: &TimeSeries,
    d: usize,
    seasonal_d: usize,
    lag: usize,
) -> Result<Differenced> {
    if lag == 0 {
        return Err(Error::input("difference lag must be at least 1"));
    }
    let lost = d + seasonal_d * lag;
    if s.len() <= lost {
        return Err(Error::input(format!(
            "series of length {} too short for d={d}, D={seasonal_d}, lag={lag}",
            s.len()
        )));
    }
    let mut x = s.values().to_vec();
    let mut stages = Vec::with_capacity(d + seasonal_d);
    for step in std::iter::repeat_n(1, d).chain(std::iter::repeat_n(lag, seasonal_d)) {
        stages.push(Stage {
            lag: step,
            head: x[..step].to_vec(),
        });
        x = lag_difference(&x, step);
    }
    let series = TimeSeries::new(x, s.period_at(lost), s.period_length())?;
    Ok(Differenced {
        series,
        stages,
        source: s.clone(),
    })
}

/// `∇^d ∇^D_lag s`, with the origin advanced by the number of values lost.
pub fn difference(s: &TimeSeries, d: usize, seasonal_d: usize, lag: usize) -> Result<TimeSeries> {
    difference_with_history(s, d, seasonal_d, lag).map(|r| r.series)
}
