//! Additive and multiplicative Holt-Winters smoothing.
//!
//! The additive recursions, with `m` the seasonal period, are
//!
//! ```text
//! yhat_{t+h|t} = l_t + h b_t + s_{t+h-m(k+1)},   k = floor((h-1)/m)
//! l_t = alpha (y_t - s_{t-m}) + (1 - alpha)(l_{t-1} + b_{t-1})
//! b_t = beta (l_t - l_{t-1}) + (1 - beta) b_{t-1}
//! s_t = gamma (y_t - l_{t-1} - b_{t-1}) + (1 - gamma) s_{t-m}
//! ```
//!
//! The multiplicative variant divides by the seasonal index in the level
//! and seasonal equations and multiplies `(l + h b)` by it when forecasting.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::metrics::ForecastResult;
use crate::optim::{lex_cmp, nelder_mead_restarted, NelderMead};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HwParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub method: Method,
}

impl HwParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, method: Method) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::input(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(HwParams {
            alpha,
            beta,
            gamma,
            method,
        })
    }

    #[cfg(test)]
    fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }
}

/// Level, trend and the last `m` seasonal indices (most recent last).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HwState {
    pub level: f64,
    pub trend: f64,
    pub seasonal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HwFit {
    pub params: HwParams,
    pub initial_state: HwState,
    /// State after the last observation, the forecast origin.
    pub final_state: HwState,
    /// One-step-ahead predictions on the calendar of the observations.
    pub fitted: TimeSeries,
    pub residuals: Vec<f64>,
    pub sse: f64,
}

/// Seed state from the first two seasonal cycles.
///
/// The trend is the change in cycle means divided by `m`. Seasonal indices
/// are the first-cycle deviations (additive) or ratios (multiplicative)
/// from that trend line, normalized to sum to 0 or `m`. The level is the
/// trend line extrapolated back to the period before the first observation,
/// so the state is the one the recursions expect at `t = 0`.
pub fn hw_initial_state(s: &TimeSeries, method: Method) -> Result<HwState> {
    let m = s.period_length();
    let y = s.values();
    if y.len() < 2 * m {
        return Err(Error::input(format!(
            "Holt-Winters initialization needs two full cycles ({} values), got {}",
            2 * m,
            y.len()
        )));
    }
    let mf = m as f64;
    let cycle1 = y[..m].iter().sum::<f64>() / mf;
    let cycle2 = y[m..2 * m].iter().sum::<f64>() / mf;
    let trend = (cycle2 - cycle1) / mf;
    let centre = (mf + 1.0) / 2.0;
    let line = |t: usize| cycle1 + (t as f64 - centre) * trend;

    let seasonal = match method {
        Method::Additive => {
            let raw: Vec<f64> = (0..m).map(|i| y[i] - line(i + 1)).collect();
            let mean = raw.iter().sum::<f64>() / mf;
            raw.into_iter().map(|v| v - mean).collect()
        }
        Method::Multiplicative => {
            let mut raw = Vec::with_capacity(m);
            for i in 0..m {
                let base = line(i + 1);
                if base <= 0.0 || y[i] <= 0.0 {
                    return Err(Error::domain(i, "multiplicative initialization needs positive values"));
                }
                raw.push(y[i] / base);
            }
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v * mf / total).collect()
        }
    };
    Ok(HwState {
        level: cycle1 - centre * trend,
        trend,
        seasonal,
    })
}

/// Run the smoothing recursions over `s` from `init`.
pub fn hw_filter(s: &TimeSeries, params: HwParams, init: &HwState) -> Result<HwFit> {
    let m = s.period_length();
    if init.seasonal.len() != m {
        return Err(Error::input(format!(
            "initial state has {} seasonal indices, series period is {m}",
            init.seasonal.len()
        )));
    }
    let y = s.values();
    if params.method == Method::Multiplicative {
        if let Some(i) = y.iter().position(|v| *v <= 0.0) {
            return Err(Error::domain(i, "multiplicative Holt-Winters needs positive observations"));
        }
    }
    let HwParams {
        alpha,
        beta,
        gamma,
        method,
    } = params;
    let mut level = init.level;
    let mut trend = init.trend;
    let mut seasonal: VecDeque<f64> = init.seasonal.iter().copied().collect();
    let mut fitted = Vec::with_capacity(y.len());
    let mut residuals = Vec::with_capacity(y.len());

    for (t, &obs) in y.iter().enumerate() {
        let season = seasonal.pop_front().expect("m > 0");
        let base = level + trend;
        let (pred, new_level, new_season) = match method {
            Method::Additive => (
                base + season,
                alpha * (obs - season) + (1.0 - alpha) * base,
                gamma * (obs - base) + (1.0 - gamma) * season,
            ),
            Method::Multiplicative => (
                base * season,
                alpha * (obs / season) + (1.0 - alpha) * base,
                gamma * (obs / base) + (1.0 - gamma) * season,
            ),
        };
        if !(pred.is_finite() && new_level.is_finite() && new_season.is_finite()) {
            return Err(Error::Numerical(format!(
                "Holt-Winters recursion diverged at t = {t}"
            )));
        }
        trend = beta * (new_level - level) + (1.0 - beta) * trend;
        level = new_level;
        seasonal.push_back(new_season);
        fitted.push(pred);
        residuals.push(obs - pred);
    }

    let sse = residuals.iter().map(|e| e * e).sum();
    Ok(HwFit {
        params,
        initial_state: init.clone(),
        final_state: HwState {
            level,
            trend,
            seasonal: seasonal.into_iter().collect(),
        },
        fitted: s.with_values(fitted)?,
        residuals,
        sse,
    })
}

/// Coarse grid used to seed the optimizer, per smoothing constant.
const START_GRID: [f64; 3] = [0.1, 0.5, 0.9];

/// Minimize the one-step SSE over `(alpha, beta, gamma) in [0, 1]^3`.
///
/// Evaluates a 3x3x3 grid, then runs a bounded Nelder–Mead (with restarts)
/// from the best grid point. Ties are broken towards the lexicographically
/// smallest parameter triple, so the result depends only on the series.
pub fn hw_optimize(s: &TimeSeries, method: Method) -> Result<HwFit> {
    let m = s.period_length();
    if s.len() < 3 * m {
        return Err(Error::input(format!(
            "Holt-Winters optimization needs three cycles ({} values), got {}",
            3 * m,
            s.len()
        )));
    }
    // Surface data errors (e.g. non-positive values) before optimizing.
    hw_filter(s, HwParams::new(0.5, 0.5, 0.5, method)?, &hw_initial_state(s, method)?)?;
    // The additive recursion commutes with shifts, so search on data
    // anchored at the first value to keep the objective well scaled.
    let anchored = match method {
        Method::Additive => {
            let y0 = s.values()[0];
            s.with_values(s.values().iter().map(|v| v - y0).collect())?
        }
        Method::Multiplicative => s.clone(),
    };
    let init = hw_initial_state(&anchored, method)?;

    let sse = |x: &[f64]| {
        let p = HwParams {
            alpha: x[0],
            beta: x[1],
            gamma: x[2],
            method,
        };
        hw_filter(&anchored, p, &init).map_or(f64::INFINITY, |f| f.sse)
    };

    let mut start: Option<([f64; 3], f64)> = None;
    for &a in &START_GRID {
        for &b in &START_GRID {
            for &g in &START_GRID {
                let v = sse(&[a, b, g]);
                if start.is_none_or(|(_, best)| v < best) {
                    start = Some(([a, b, g], v));
                }
            }
        }
    }
    let (x0, v0) = start.expect("non-empty grid");
    let bounds = [(0.0, 1.0); 3];
    let opts = NelderMead {
        max_iter: 3000,
        f_tol: 1e-14,
        x_tol: 1e-10,
        step: 0.2,
    };
    let found = nelder_mead_restarted(&sse, &x0, Some(&bounds), opts, 10);
    let best = if found.value < v0 || (found.value == v0 && lex_cmp(&found.x, &x0).is_lt()) {
        [found.x[0], found.x[1], found.x[2]]
    } else {
        x0
    };
    hw_filter(s, HwParams::new(best[0], best[1], best[2], method)?, &hw_initial_state(s, method)?)
}

/// Variance multiplier `c_h` of the h-step additive forecast error.
pub fn variance_multiplier(params: &HwParams, h: usize, m: usize) -> f64 {
    let HwParams {
        alpha, beta, gamma, ..
    } = *params;
    1.0 + (1..h)
        .map(|j| {
            let seasonal = if j % m == 0 { gamma * (1.0 - alpha) } else { 0.0 };
            (alpha * (1.0 + j as f64 * beta) + seasonal).powi(2)
        })
        .sum::<f64>()
}

/// Point forecasts `1..=h` steps past the fitted sample with a central
/// `level` band of half-width `z * sigma * sqrt(c_h)`, where
/// `sigma^2 = sse / (n - 3)`.
pub fn hw_forecast(fit: &HwFit, h: usize, level: f64) -> Result<ForecastResult> {
    if h < 1 {
        return Err(Error::input("forecast horizon must be at least 1"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::input(format!("interval level {level} outside (0, 1)")));
    }
    let m = fit.fitted.period_length();
    let n = fit.fitted.len();
    if n < 2 * m {
        return Err(Error::input("forecasting needs a fit on at least two cycles"));
    }
    let state = &fit.final_state;
    let z = Normal::standard().inverse_cdf((1.0 + level) / 2.0);
    let sigma = (fit.sse / (n as f64 - 3.0).max(1.0)).sqrt();

    let mut points = Vec::with_capacity(h);
    let mut lower = Vec::with_capacity(h);
    let mut upper = Vec::with_capacity(h);
    for step in 1..=h {
        let season = state.seasonal[(step - 1) % m];
        let base = state.level + step as f64 * state.trend;
        let point = match fit.params.method {
            Method::Additive => base + season,
            Method::Multiplicative => base * season,
        };
        let half = z * sigma * variance_multiplier(&fit.params, step, m).sqrt();
        points.push(point);
        lower.push(point - half);
        upper.push(point + half);
    }
    let origin = fit.fitted.period_at(n);
    let calendar = |v| TimeSeries::new(v, origin, m);
    let label = match fit.params.method {
        Method::Additive => "Holt-Winters additive",
        Method::Multiplicative => "Holt-Winters multiplicative",
    };
    ForecastResult::new(calendar(points)?, calendar(lower)?, calendar(upper)?, level, label)
}
