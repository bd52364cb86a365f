//! Unit-root and portmanteau tests.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::correlogram::acf;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Significance levels reported by every test.
pub const LEVELS: [f64; 3] = [0.01, 0.05, 0.10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub lags_used: usize,
    /// `(level, rejected)` for each entry of [`LEVELS`].
    pub reject_at: Vec<(f64, bool)>,
}

impl TestResult {
    /// Whether the null is rejected at `level` (one of [`LEVELS`]).
    pub fn rejects(&self, level: f64) -> Option<bool> {
        self.reject_at
            .iter()
            .find(|(l, _)| (l - level).abs() < 1e-12)
            .map(|&(_, r)| r)
    }
}

struct CriticalTable {
    probs: Vec<f64>,
    rows: Vec<(f64, Vec<f64>)>,
}

fn pp_table() -> &'static CriticalTable {
    static TABLE: OnceLock<CriticalTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let text = include_str!("../data/pp_critical_values.csv");
        let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
        let header = lines.next().expect("critical value header");
        let probs = header
            .split(',')
            .skip(1)
            .map(|p| p.parse().expect("probability"))
            .collect();
        let rows = lines
            .map(|l| {
                let mut fields = l.split(',').map(|f| f.parse::<f64>().expect("number"));
                let n = fields.next().expect("sample size");
                (n, fields.collect())
            })
            .collect();
        CriticalTable { probs, rows }
    })
}

fn interpolate(x: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    if x1 == x0 {
        y0
    } else {
        y0 + (x - x0) * (y1 - y0) / (x1 - x0)
    }
}

impl CriticalTable {
    /// Critical values for sample size `n`, linear in `n` between rows and
    /// clamped to the first and last row outside the tabulated range.
    fn critical_values(&self, n: f64) -> Vec<f64> {
        let rows = &self.rows;
        let first = &rows[0];
        let last = &rows[rows.len() - 1];
        if n <= first.0 {
            return first.1.clone();
        }
        if n >= last.0 {
            return last.1.clone();
        }
        let i = rows.iter().position(|(size, _)| *size >= n).unwrap();
        let (lo, hi) = (&rows[i - 1], &rows[i]);
        lo.1.iter()
            .zip(&hi.1)
            .map(|(a, b)| interpolate(n, lo.0, hi.0, *a, *b))
            .collect()
    }

    /// Left-tail p-value, linear between tabulated quantiles and clamped to
    /// the grid boundaries.
    fn p_value(&self, stat: f64, crit: &[f64]) -> f64 {
        let probs = &self.probs;
        if stat <= crit[0] {
            return probs[0];
        }
        if stat >= crit[crit.len() - 1] {
            return probs[probs.len() - 1];
        }
        let i = crit.iter().position(|c| *c >= stat).unwrap();
        interpolate(stat, crit[i - 1], crit[i], probs[i - 1], probs[i])
    }

    fn critical_at(&self, level: f64, crit: &[f64]) -> f64 {
        let i = self
            .probs
            .iter()
            .position(|p| (p - level).abs() < 1e-12)
            .expect("level present in table");
        crit[i]
    }
}

/// Newey–West truncation lag `floor(4 (n/100)^(1/4))`.
pub fn newey_west_lag(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

/// Phillips–Perron `Z_alpha` test of a unit root against stationarity,
/// regression `y_t = c + rho y_{t-1} + u_t`.
///
/// The long-run variance uses a Bartlett-weighted Newey–West estimator.
/// Small p-values reject the unit root; p-values are clamped to `[0.01, 0.10]`.
pub fn phillips_perron(s: &TimeSeries) -> Result<TestResult> {
    let y = s.values();
    if y.len() < 20 {
        return Err(Error::input(format!(
            "Phillips-Perron needs at least 20 observations, got {}",
            y.len()
        )));
    }
    let lagged = &y[..y.len() - 1];
    let current = &y[1..];
    let t = current.len() as f64;
    let mean_x = lagged.iter().sum::<f64>() / t;
    let mean_y = current.iter().sum::<f64>() / t;
    let sxx: f64 = lagged.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let sxy: f64 = lagged
        .iter()
        .zip(current)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let rho = sxy / sxx;
    let intercept = mean_y - rho * mean_x;
    let resid: Vec<f64> = lagged
        .iter()
        .zip(current)
        .map(|(x, y)| y - intercept - rho * x)
        .collect();

    let lags = newey_west_lag(resid.len());
    let autocov = |j: usize| resid[j..].iter().zip(&resid).map(|(a, b)| a * b).sum::<f64>() / t;
    let gamma0 = autocov(0);
    let long_run = gamma0
        + 2.0
            * (1..=lags)
                .map(|j| (1.0 - j as f64 / (lags as f64 + 1.0)) * autocov(j))
                .sum::<f64>();

    // With se(rho)^2 = s^2 / Sxx the correction term reduces to T^2 / Sxx.
    let statistic = t * (rho - 1.0) - 0.5 * (t * t / sxx) * (long_run - gamma0);
    if !statistic.is_finite() {
        return Err(Error::Numerical("non-finite Phillips-Perron statistic".into()));
    }

    let table = pp_table();
    let crit = table.critical_values(t);
    let p_value = table.p_value(statistic, &crit);
    let reject_at = LEVELS
        .iter()
        .map(|&level| (level, statistic < table.critical_at(level, &crit)))
        .collect();
    Ok(TestResult {
        statistic,
        p_value,
        lags_used: lags,
        reject_at,
    })
}

/// Ljung–Box portmanteau test on model residuals, with
/// `lags - fitted_params` chi-square degrees of freedom.
pub fn ljung_box(residuals: &[f64], lags: usize, fitted_params: usize) -> Result<TestResult> {
    if lags <= fitted_params {
        return Err(Error::input(format!(
            "Ljung-Box lags ({lags}) must exceed the fitted parameter count ({fitted_params})"
        )));
    }
    let n = residuals.len();
    if n <= lags {
        return Err(Error::input(format!(
            "Ljung-Box needs more than {lags} residuals, got {n}"
        )));
    }
    let rho = acf(residuals, lags)?;
    let nf = n as f64;
    let q = nf
        * (nf + 2.0)
        * (1..=lags)
            .map(|k| rho[k] * rho[k] / (nf - k as f64))
            .sum::<f64>();
    let dist = ChiSquared::new((lags - fitted_params) as f64)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let p_value = dist.sf(q).clamp(0.0, 1.0);
    Ok(TestResult {
        statistic: q,
        p_value,
        lags_used: lags,
        reject_at: LEVELS.iter().map(|&l| (l, p_value < l)).collect(),
    })
}
