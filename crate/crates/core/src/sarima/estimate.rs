use rayon::prelude::*;

use super::poly::constrain_stationary;
use super::state_space::state_space_unchecked;
use super::{aic, SarimaModel, SarimaOrder, SarimaParams};
use crate::dlm::kalman_loglik;
use crate::error::{Error, Result};
use crate::optim::{nelder_mead_restarted, NelderMead};
use crate::series::TimeSeries;
use crate::transform::difference;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Unconstrained coordinates are kept in this box; partial
/// autocorrelations then stay within about 0.9965 of the unit circle.
const U_BOUND: f64 = 12.0;

fn differenced(order: &SarimaOrder, s: &TimeSeries) -> Result<Vec<f64>> {
    let w = difference(s, order.d, order.seasonal_d, order.period)?;
    if w.len() < order.n_coefficients() + 2 {
        return Err(Error::input(format!(
            "{} values after differencing, {order} needs at least {}",
            w.len(),
            order.n_coefficients() + 2
        )));
    }
    Ok(w.into_values())
}

/// Innovation sums of a unit-variance model: `(sum e^2 / Q, sum ln Q, n)`.
fn unit_variance_sums(order: &SarimaOrder, coeffs: &SarimaParams, w: &[f64]) -> Option<(f64, f64)> {
    let spec = state_space_unchecked(order, coeffs).ok()?;
    let summary = kalman_loglik(&spec, w).ok()?;
    let mut ss = 0.0;
    let mut log_det = 0.0;
    for (e, q) in summary.innovations.iter().zip(&summary.variances) {
        ss += e * e / q;
        log_det += q.ln();
    }
    (ss.is_finite() && log_det.is_finite()).then_some((ss, log_det))
}

/// Exact Gaussian log-likelihood of `s` under the given parameters, via
/// the Kalman filter on the differenced series.
///
/// Parameters outside the stationary and invertible region give
/// `-inf`; a series too short for the order is an input error.
pub fn loglik(order: &SarimaOrder, params: &SarimaParams, s: &TimeSeries) -> Result<f64> {
    params.check_lengths(order)?;
    let w = differenced(order, s)?;
    if !params.is_admissible(order) {
        return Ok(f64::NEG_INFINITY);
    }
    let unit = SarimaParams {
        sigma2: 1.0,
        ..params.clone()
    };
    let Some((ss, log_det)) = unit_variance_sums(order, &unit, &w) else {
        return Ok(f64::NEG_INFINITY);
    };
    let n = w.len() as f64;
    let s2 = params.sigma2;
    Ok(-0.5 * (n * (LN_2PI + s2.ln()) + log_det + ss / s2))
}

/// Concentrated log-likelihood and the variance estimate that attains it.
fn concentrated(order: &SarimaOrder, coeffs: &SarimaParams, w: &[f64]) -> Option<(f64, f64)> {
    if !coeffs.is_admissible(order) {
        return None;
    }
    let (ss, log_det) = unit_variance_sums(order, coeffs, w)?;
    let n = w.len() as f64;
    let sigma2 = ss / n;
    if !(sigma2 > 0.0) {
        return None;
    }
    Some((-0.5 * n * (LN_2PI + sigma2.ln() + 1.0) - 0.5 * log_det, sigma2))
}

/// Map unconstrained coordinates to coefficients, unit variance.
fn coefficients(order: &SarimaOrder, u: &[f64]) -> SarimaParams {
    let (p, q, sp) = (order.p, order.q, order.seasonal_p);
    let neg = |v: Vec<f64>| v.into_iter().map(|c| -c).collect();
    SarimaParams {
        phi: constrain_stationary(&u[..p]),
        theta: neg(constrain_stationary(&u[p..p + q])),
        seasonal_phi: constrain_stationary(&u[p + q..p + q + sp]),
        seasonal_theta: neg(constrain_stationary(&u[p + q + sp..])),
        sigma2: 1.0,
    }
}

/// Maximum likelihood fit starting from all coefficients at zero.
pub fn fit(order: &SarimaOrder, s: &TimeSeries) -> Result<SarimaModel> {
    let w = differenced(order, s)?;
    let k = order.n_coefficients();
    let objective = |u: &[f64]| match concentrated(order, &coefficients(order, u), &w) {
        Some((ll, _)) => -ll,
        None => f64::INFINITY,
    };
    let x0 = vec![0.0; k];
    if !objective(&x0).is_finite() {
        return Err(Error::Model(format!("{order}: non-finite likelihood at the starting point")));
    }
    let u = if k == 0 {
        x0
    } else {
        let bounds = vec![(-U_BOUND, U_BOUND); k];
        let opts = NelderMead {
            max_iter: 400 * k,
            f_tol: 1e-10,
            x_tol: 1e-7,
            step: 0.25,
        };
        nelder_mead_restarted(&objective, &x0, Some(&bounds), opts, 3).x
    };
    let mut params = coefficients(order, &u);
    let (ll, sigma2) = concentrated(order, &params, &w)
        .ok_or_else(|| Error::Model(format!("{order}: optimum left the admissible region")))?;
    params.sigma2 = sigma2;
    Ok(SarimaModel {
        order: *order,
        params,
        loglik: ll,
        aic: aic(ll, order.n_coefficients() + 1),
        n_used: w.len(),
    })
}

/// Ranked outcome of [`grid_search`].
#[derive(Debug, Clone)]
pub struct GridReport {
    /// Successful fits, best first.
    pub ranked: Vec<SarimaModel>,
    /// Orders whose fit failed, with the reason.
    pub failures: Vec<(SarimaOrder, String)>,
}

impl GridReport {
    pub fn best(&self) -> &SarimaModel {
        &self.ranked[0]
    }

    /// `rank,p,d,q,P,D,Q,s,loglik,aic,sigma2,status` rows, best first;
    /// failed orders come last with empty numeric fields.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("rank,p,d,q,P,D,Q,s,loglik,aic,sigma2,status\n");
        let orders = |o: &SarimaOrder| {
            format!(
                "{},{},{},{},{},{},{}",
                o.p, o.d, o.q, o.seasonal_p, o.seasonal_d, o.seasonal_q, o.period
            )
        };
        for (i, m) in self.ranked.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},ok\n",
                i + 1,
                orders(&m.order),
                m.loglik,
                m.aic,
                m.params.sigma2
            ));
        }
        for (o, _) in &self.failures {
            out.push_str(&format!(",{},,,,failed\n", orders(o)));
        }
        out
    }
}

fn rank_key(m: &SarimaModel) -> [usize; 4] {
    [m.order.p, m.order.q, m.order.seasonal_p, m.order.seasonal_q]
}

/// Fit every `(p, q, P, Q)` in `{0, 1}^4` with fixed differencing and rank
/// by AIC, then by parameter count, then lexicographically by order.
pub fn grid_search(s: &TimeSeries, d: usize, seasonal_d: usize, period: usize) -> Result<GridReport> {
    let mut orders = Vec::with_capacity(16);
    for p in 0..2 {
        for q in 0..2 {
            for sp in 0..2 {
                for sq in 0..2 {
                    orders.push(SarimaOrder::new((p, d, q), (sp, seasonal_d, sq), period)?);
                }
            }
        }
    }
    let results: Vec<(SarimaOrder, Result<SarimaModel>)> =
        orders.par_iter().map(|o| (*o, fit(o, s))).collect();
    let mut ranked = Vec::new();
    let mut failures = Vec::new();
    for (o, r) in results {
        match r {
            Ok(m) => ranked.push(m),
            Err(e) => {
                log::warn!("SARIMA{o} fit failed: {e}");
                failures.push((o, e.to_string()));
            }
        }
    }
    if ranked.is_empty() {
        return Err(Error::Model("all 16 SARIMA fits failed".into()));
    }
    ranked.sort_by(|a, b| {
        let tol = 1e-9 * a.aic.abs().max(b.aic.abs()).max(1.0);
        let by_aic = if (a.aic - b.aic).abs() <= tol {
            std::cmp::Ordering::Equal
        } else {
            a.aic.total_cmp(&b.aic)
        };
        by_aic
            .then(a.n_params().cmp(&b.n_params()))
            .then(rank_key(a).cmp(&rank_key(b)))
    });
    Ok(GridReport { ranked, failures })
}
