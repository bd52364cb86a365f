use nalgebra::{DMatrix, DVector};

use super::linalg::symmetrize;
use super::spec::DlmSpec;
use crate::error::{Error, Result};

/// Forecast variances at or below this are treated as zero.
const MIN_FORECAST_VARIANCE: f64 = 1e-300;

/// Per-time filtered and one-step predictive moments. Index `t` refers to
/// the `(t+1)`-th observation.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterResult {
    /// Predicted state means `a_t = G m_{t-1}`.
    pub a: Vec<DVector<f64>>,
    /// Predicted state covariances `R_t`.
    pub r: Vec<DMatrix<f64>>,
    /// One-step forecast means `f_t = F a_t`.
    pub f: Vec<f64>,
    /// One-step forecast variances `Q_t`.
    pub q: Vec<f64>,
    /// Filtered means `m_t`.
    pub m: Vec<DVector<f64>>,
    /// Filtered covariances `C_t`.
    pub c: Vec<DMatrix<f64>>,
    /// `sum_t log N(y_t | f_t, Q_t)`.
    pub loglik: f64,
}

impl FilterResult {
    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// One-step forecast errors `y_t - f_t`.
    pub fn innovations(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.f).map(|(y, f)| y - f).collect()
    }

    /// `(m_t, C_t)` for `t = 0..=n`, where index 0 is the prior.
    pub(crate) fn filtered_with_prior<'a>(
        &'a self,
        spec: &'a DlmSpec,
        t: usize,
    ) -> (&'a DVector<f64>, &'a DMatrix<f64>) {
        if t == 0 {
            (&spec.m0, &spec.c0)
        } else {
            (&self.m[t - 1], &self.c[t - 1])
        }
    }
}

/// Kalman filter for a constant-matrix DLM.
///
/// A zero forecast variance is accepted only when the observation matches
/// the forecast (a noiseless, fully determined state); the update is then
/// skipped and the step contributes nothing to the log-likelihood.
pub fn kalman_filter(spec: &DlmSpec, y: &[f64]) -> Result<FilterResult> {
    let p = spec.state_dim();
    let n = y.len();
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::domain(i, "non-finite observation"));
    }
    let gt = spec.g.transpose();
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();

    let mut out = FilterResult {
        a: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
        f: Vec::with_capacity(n),
        q: Vec::with_capacity(n),
        m: Vec::with_capacity(n),
        c: Vec::with_capacity(n),
        loglik: 0.0,
    };
    let mut m = spec.m0.clone();
    let mut c = spec.c0.clone();

    for (t, &obs) in y.iter().enumerate() {
        let a = &spec.g * &m;
        let mut r = &spec.g * &c * &gt + &spec.w;
        symmetrize(&mut r);
        let rf = &r * &spec.f;
        let f = spec.f.dot(&a);
        let q = spec.f.dot(&rf) + spec.v;
        let e = obs - f;

        if q <= MIN_FORECAST_VARIANCE {
            if e.abs() > 1e-9 * obs.abs().max(1.0) {
                return Err(Error::DegenerateForecastVariance { t, variance: q });
            }
            m = a.clone();
            c = r.clone();
        } else {
            m = &a + &rf * (e / q);
            c = &r - &rf * rf.transpose() / q;
            symmetrize(&mut c);
            out.loglik -= 0.5 * (ln_2pi + q.ln() + e * e / q);
        }
        debug_assert_eq!(m.len(), p);
        out.a.push(a);
        out.r.push(r);
        out.f.push(f);
        out.q.push(q);
        out.m.push(m.clone());
        out.c.push(c.clone());
    }
    if !out.loglik.is_finite() {
        return Err(Error::Numerical("non-finite filter log-likelihood".into()));
    }
    Ok(out)
}


/// Innovations and their variances from a likelihood-only filter pass.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationSummary {
    pub loglik: f64,
    pub innovations: Vec<f64>,
    pub variances: Vec<f64>,
}

/// Relative change in the filtered covariance below which the recursion
/// is considered converged.
const STEADY_STATE_TOL: f64 = 1e-13;

/// Likelihood-only Kalman pass that keeps no per-step state history and
/// stops propagating the covariance once the gain has converged, which it
/// does for stationary models with constant matrices.
pub(crate) fn kalman_loglik(spec: &DlmSpec, y: &[f64]) -> Result<InnovationSummary> {
    let p = spec.state_dim();
    let gt = spec.g.transpose();
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    let mut m = spec.m0.clone();
    let mut a = DVector::zeros(p);
    let mut c = spec.c0.clone();
    let mut gc = DMatrix::zeros(p, p);
    let mut r = DMatrix::zeros(p, p);
    let mut rf = DVector::zeros(p);
    let mut gain = DVector::zeros(p);
    let mut prev_c = DMatrix::zeros(p, p);
    let mut steady_q: Option<f64> = None;
    let mut calm_steps = 0;

    let mut out = InnovationSummary {
        loglik: 0.0,
        innovations: Vec::with_capacity(y.len()),
        variances: Vec::with_capacity(y.len()),
    };
    for (t, &obs) in y.iter().enumerate() {
        a.gemv(1.0, &spec.g, &m, 0.0);
        let f = spec.f.dot(&a);
        let e = obs - f;
        let q = match steady_q {
            Some(q) => q,
            None => {
                gc.gemm(1.0, &spec.g, &c, 0.0);
                r.copy_from(&spec.w);
                r.gemm(1.0, &gc, &gt, 1.0);
                rf.gemv(1.0, &r, &spec.f, 0.0);
                let q = spec.f.dot(&rf) + spec.v;
                if q <= MIN_FORECAST_VARIANCE {
                    return Err(Error::DegenerateForecastVariance { t, variance: q });
                }
                gain = &rf / q;
                // C = R - rf rf^T / q
                prev_c.copy_from(&c);
                c.copy_from(&r);
                c.ger(-1.0 / q, &rf, &rf, 1.0);
                symmetrize(&mut c);
                // The recursion for C is autonomous, so a fixed point of C
                // fixes every later gain and variance.
                let scale = c.amax().max(f64::MIN_POSITIVE);
                let settled = (&c - &prev_c).amax() <= STEADY_STATE_TOL * scale;
                calm_steps = if settled { calm_steps + 1 } else { 0 };
                if calm_steps >= 3 {
                    steady_q = Some(q);
                }
                q
            }
        };
        m.copy_from(&a);
        m.axpy(e, &gain, 1.0);
        out.loglik -= 0.5 * (ln_2pi + q.ln() + e * e / q);
        out.innovations.push(e);
        out.variances.push(q);
    }
    if !out.loglik.is_finite() {
        return Err(Error::Numerical("non-finite filter log-likelihood".into()));
    }
    Ok(out)
}
