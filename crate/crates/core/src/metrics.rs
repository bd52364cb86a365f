//! Forecast accuracy metrics, growth rates and model score cards.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Point forecasts with a central prediction band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub points: TimeSeries,
    pub lower: TimeSeries,
    pub upper: TimeSeries,
    /// Nominal coverage of the band, in (0, 1).
    pub level: f64,
    pub model_label: String,
}

impl ForecastResult {
    pub fn new(
        points: TimeSeries,
        lower: TimeSeries,
        upper: TimeSeries,
        level: f64,
        model_label: impl Into<String>,
    ) -> Result<Self> {
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::input(format!("interval level {level} outside (0, 1)")));
        }
        let same_calendar = |a: &TimeSeries, b: &TimeSeries| {
            a.origin() == b.origin() && a.len() == b.len() && a.period_length() == b.period_length()
        };
        if !same_calendar(&points, &lower) || !same_calendar(&points, &upper) {
            return Err(Error::input("forecast bounds must share the point calendar"));
        }
        let tol = |v: f64| 1e-9 * v.abs().max(1.0);
        for (i, ((l, p), u)) in lower
            .values()
            .iter()
            .zip(points.values())
            .zip(upper.values())
            .enumerate()
        {
            if *l > p + tol(*p) || *p > u + tol(*p) {
                return Err(Error::domain(i, format!("band [{l}, {u}] excludes point {p}")));
            }
        }
        Ok(ForecastResult {
            points,
            lower,
            upper,
            level,
            model_label: model_label.into(),
        })
    }

    pub fn horizon(&self) -> usize {
        self.points.len()
    }

    /// Apply a monotone increasing map (e.g. `exp`) to points and bounds.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let map = |s: &TimeSeries| s.with_values(s.values().iter().map(|v| f(*v)).collect());
        ForecastResult::new(
            map(&self.points)?,
            map(&self.lower)?,
            map(&self.upper)?,
            self.level,
            self.model_label.clone(),
        )
    }

    /// CSV with columns `date,point,lower,upper`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("date,point,lower,upper\n");
        for (i, p) in self.points.periods().enumerate() {
            let _ = writeln!(
                out,
                "{p},{},{},{}",
                self.points.values()[i],
                self.lower.values()[i],
                self.upper.values()[i]
            );
        }
        out
    }
}

fn check_pair(actual: &[f64], predicted: &[f64]) -> Result<()> {
    if actual.len() != predicted.len() {
        return Err(Error::input(format!(
            "actual has {} values, predicted has {}",
            actual.len(),
            predicted.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::input("metrics need at least one value"));
    }
    Ok(())
}

pub fn rmse(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let mse = actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).powi(2))
        .sum::<f64>()
        / actual.len() as f64;
    Ok(mse.sqrt())
}

pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    Ok(actual.iter().zip(predicted).map(|(a, p)| (a - p).abs()).sum::<f64>() / actual.len() as f64)
}

/// Mean absolute percentage error, in percent.
pub fn mape(actual: &[f64], predicted: &[f64]) -> Result<f64> {
    check_pair(actual, predicted)?;
    let mut total = 0.0;
    for (i, (a, p)) in actual.iter().zip(predicted).enumerate() {
        if *a == 0.0 {
            return Err(Error::domain(i, "MAPE undefined for a zero actual value"));
        }
        total += ((a - p) / a).abs();
    }
    Ok(100.0 * total / actual.len() as f64)
}

/// Which Theil inequality coefficient to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheilVariant {
    /// Bounded accuracy ratio in `[0, 1]`.
    U1,
    /// Relative-change errors against the naive last-value forecast; 1 means
    /// no better than naive.
    U2,
}

pub fn u_theil(actual: &[f64], predicted: &[f64], variant: TheilVariant) -> Result<f64> {
    check_pair(actual, predicted)?;
    match variant {
        TheilVariant::U1 => {
            let n = actual.len() as f64;
            let root_mean_sq = |x: &[f64]| (x.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
            let den = root_mean_sq(actual) + root_mean_sq(predicted);
            if den == 0.0 {
                return Err(Error::domain(0, "U1 undefined for all-zero series"));
            }
            Ok(rmse(actual, predicted)? / den)
        }
        TheilVariant::U2 => {
            if actual.len() < 2 {
                return Err(Error::input("U2 needs at least two observations"));
            }
            let mut num = 0.0;
            let mut den = 0.0;
            for t in 0..actual.len() - 1 {
                let base = actual[t];
                if base == 0.0 {
                    return Err(Error::domain(t, "U2 undefined for a zero actual value"));
                }
                num += ((predicted[t + 1] - actual[t + 1]) / base).powi(2);
                den += ((actual[t + 1] - actual[t]) / base).powi(2);
            }
            if den == 0.0 {
                return Err(Error::domain(0, "U2 undefined for a constant actual series"));
            }
            Ok(num.sqrt() / den.sqrt())
        }
    }
}

/// Period-over-period relative change `(y_t - y_{t-1}) / y_{t-1}`.
pub fn growth_rate(s: &TimeSeries) -> Result<TimeSeries> {
    let y = s.values();
    if y.len() < 2 {
        return Err(Error::input("growth rate needs at least two observations"));
    }
    if let Some(i) = y.iter().position(|v| *v == 0.0) {
        return Err(Error::domain(i, "growth rate undefined after a zero value"));
    }
    let g = y.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect();
    TimeSeries::new(g, s.period_at(1), s.period_length())
}

/// One model's accuracy on a common calendar window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub label: String,
    pub rmse: f64,
    pub mae: f64,
    pub mape: f64,
    pub u1: f64,
    pub u2: f64,
    /// Number of aligned observations scored.
    pub n: usize,
}

/// Restrict two series to their common calendar window.
pub fn align(actual: &TimeSeries, predicted: &TimeSeries) -> Result<(TimeSeries, TimeSeries)> {
    if actual.period_length() != predicted.period_length() {
        return Err(Error::input("cannot align series with different seasonal periods"));
    }
    let start = actual.origin().max(predicted.origin());
    let end = actual.end().min(predicted.end());
    let (Some(a0), Some(p0)) = (actual.index_of(start), predicted.index_of(start)) else {
        return Err(Error::input("actual and predicted series do not overlap"));
    };
    let (Some(a1), Some(p1)) = (actual.index_of(end), predicted.index_of(end)) else {
        return Err(Error::input("actual and predicted series do not overlap"));
    };
    if a1 < a0 {
        return Err(Error::input("actual and predicted series do not overlap"));
    }
    let a = actual.slice(a0, a1 + 1)?;
    let p = predicted.slice(p0, p1 + 1)?;
    if a.len() != actual.len() || p.len() != predicted.len() {
        log::warn!(
            "scoring trimmed to common window {start}..{end} ({} observations)",
            a.len()
        );
    }
    Ok((a, p))
}

/// Score `predicted` against `actual` on their common calendar window.
pub fn score(actual: &TimeSeries, predicted: &TimeSeries, label: &str) -> Result<ScoreRow> {
    let (a, p) = align(actual, predicted)?;
    let (a, p) = (a.values(), p.values());
    Ok(ScoreRow {
        label: label.to_string(),
        rmse: rmse(a, p)?,
        mae: mae(a, p)?,
        mape: mape(a, p)?,
        u1: u_theil(a, p, TheilVariant::U1)?,
        u2: if a.len() >= 2 {
            u_theil(a, p, TheilVariant::U2)?
        } else {
            f64::NAN
        },
        n: a.len(),
    })
}

pub const METRIC_NAMES: [&str; 5] = ["RMSE", "MAE", "MAPE", "U1", "U2"];

/// Rows of a model comparison with the per-metric minimum flagged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub rows: Vec<ScoreRow>,
    /// `best[k]` is the row index with the smallest value of metric `k`
    /// (in [`METRIC_NAMES`] order); the first row wins ties.
    pub best: [Option<usize>; 5],
}

impl ScoreRow {
    pub fn metrics(&self) -> [f64; 5] {
        [self.rmse, self.mae, self.mape, self.u1, self.u2]
    }
}

/// Assemble rows into a score card, keeping their order.
pub fn compare(rows: Vec<ScoreRow>) -> ScoreCard {
    let mut best = [None; 5];
    for (k, slot) in best.iter_mut().enumerate() {
        let mut winner: Option<(usize, f64)> = None;
        for (i, row) in rows.iter().enumerate() {
            let v = row.metrics()[k];
            if v.is_nan() {
                continue;
            }
            if winner.is_none_or(|(_, w)| v < w) {
                winner = Some((i, v));
            }
        }
        *slot = winner.map(|(i, _)| i);
    }
    ScoreCard { rows, best }
}

impl ScoreCard {
    pub fn is_best(&self, row: usize, metric: usize) -> bool {
        self.best[metric] == Some(row)
    }

    /// Machine-readable form: `Model,RMSE,MAE,MAPE,U1,U2,N`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("Model,RMSE,MAE,MAPE,U1,U2,N\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.label, r.rmse, r.mae, r.mape, r.u1, r.u2, r.n
            );
        }
        out
    }

    /// Aligned text table; the best value of each metric carries a `*`.
    pub fn to_table(&self) -> String {
        let label_width = self
            .rows
            .iter()
            .map(|r| r.label.len())
            .chain(std::iter::once(5))
            .max()
            .unwrap_or(5);
        let mut out = format!("{:<label_width$}", "Model");
        for name in METRIC_NAMES {
            let _ = write!(out, " {name:>14}");
        }
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(out, "{:<label_width$}", r.label);
            for (k, v) in r.metrics().iter().enumerate() {
                let mark = if self.is_best(i, k) { "*" } else { " " };
                let _ = write!(out, " {:>13.6}{mark}", v);
            }
            out.push('\n');
        }
        out
    }
}
