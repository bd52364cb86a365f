use nalgebra::DVector;
use statrs::distribution::{ContinuousCDF, Normal};

use super::poly::{differencing_polynomial, poly_mul};
use super::state_space::to_state_space;
use super::SarimaModel;
use crate::dlm::kalman_filter;
use crate::error::{Error, Result};
use crate::metrics::ForecastResult;
use crate::series::TimeSeries;
use crate::transform::difference_with_history;

/// First `h` weights of `theta(B) / a(B)` where `a(B) = 1 - sum ar_k B^k`.
pub fn psi_weights(ar: &[f64], ma: &[f64], h: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(h);
    for j in 0..h {
        let mut v = if j == 0 { 1.0 } else { ma.get(j - 1).copied().unwrap_or(0.0) };
        for (k, a) in ar.iter().enumerate().take(j) {
            v += a * psi[j - k - 1];
        }
        psi.push(v);
    }
    psi
}

/// AR coefficients of `phi(B) Phi(B^s) (1 - B)^d (1 - B^s)^D`.
fn integrated_ar(model: &SarimaModel) -> (Vec<f64>, Vec<f64>) {
    let (ar, ma) = model.params.expanded(&model.order);
    let mut poly = vec![1.0];
    poly.extend(ar.iter().map(|c| -c));
    let full = poly_mul(&poly, &differencing_polynomial(&model.order));
    (full[1..].iter().map(|c| -c).collect(), ma)
}

/// One-step-ahead fitted values on the scale of `s`, starting after the
/// values consumed by differencing, and the matching residuals.
pub fn fitted_values(model: &SarimaModel, s: &TimeSeries) -> Result<(TimeSeries, Vec<f64>)> {
    let order = &model.order;
    let diffed = difference_with_history(s, order.d, order.seasonal_d, order.period)?;
    let spec = to_state_space(order, &model.params)?;
    let w = diffed.series.values();
    let filter = kalman_filter(&spec, w)?;
    let delta = differencing_polynomial(order);
    let y = s.values();
    let lost = order.lost();
    let mut fitted = Vec::with_capacity(w.len());
    let mut residuals = Vec::with_capacity(w.len());
    for (i, f) in filter.f.iter().enumerate() {
        let t = lost + i;
        // y_t = w_t - sum_{k >= 1} delta_k y_{t-k}
        let carried: f64 = delta[1..].iter().enumerate().map(|(k, c)| -c * y[t - k - 1]).sum();
        fitted.push(f + carried);
        residuals.push(y[t] - f - carried);
    }
    Ok((TimeSeries::new(fitted, s.period_at(lost), s.period_length())?, residuals))
}

/// Point forecasts from the state-space recursion on the differenced
/// series, integrated back to the scale of `s`, with bands from the
/// psi-weights of the integrated process.
pub fn forecast(model: &SarimaModel, s: &TimeSeries, h: usize, level: f64) -> Result<ForecastResult> {
    if h < 1 {
        return Err(Error::input("forecast horizon must be at least 1"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::input(format!("interval level {level} outside (0, 1)")));
    }
    let order = &model.order;
    let diffed = difference_with_history(s, order.d, order.seasonal_d, order.period)?;
    let spec = to_state_space(order, &model.params)?;
    let w = diffed.series.values();
    let filter = kalman_filter(&spec, w)?;
    let mut state: DVector<f64> = filter.m.last().cloned().unwrap_or_else(|| spec.m0.clone());
    let mut extended = w.to_vec();
    for _ in 0..h {
        state = &spec.g * state;
        extended.push(spec.f.dot(&state));
    }
    let path = diffed.integrate(&extended);
    let points = path[path.len() - h..].to_vec();

    let (ar, ma) = integrated_ar(model);
    let psi = psi_weights(&ar, &ma, h);
    let z = Normal::standard().inverse_cdf((1.0 + level) / 2.0);
    let mut acc = 0.0;
    let mut lower = Vec::with_capacity(h);
    let mut upper = Vec::with_capacity(h);
    for (p, w) in points.iter().zip(&psi) {
        acc += w * w;
        let half = z * (model.params.sigma2 * acc).sqrt();
        lower.push(p - half);
        upper.push(p + half);
    }
    let origin = s.period_at(s.len());
    let m = s.period_length();
    ForecastResult::new(
        TimeSeries::new(points, origin, m)?,
        TimeSeries::new(lower, origin, m)?,
        TimeSeries::new(upper, origin, m)?,
        level,
        format!("SARIMA{order}"),
    )
}
