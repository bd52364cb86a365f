use nalgebra::{DMatrix, DVector};

use super::filter::{kalman_filter, FilterResult};
use super::linalg::{solve_symmetric, symmetrize};
use super::spec::DlmSpec;
use crate::error::Result;
use crate::series::TimeSeries;

/// Smoothed state moments for `t = 0..=n`; index 0 is `theta_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Smoothed {
    pub mean: Vec<DVector<f64>>,
    pub cov: Vec<DMatrix<f64>>,
}

/// Rauch–Tung–Striebel backward pass over a filter run of `spec`.
pub fn kalman_smoother(spec: &DlmSpec, filter: &FilterResult) -> Smoothed {
    let n = filter.len();
    let mut mean = vec![DVector::zeros(0); n + 1];
    let mut cov = vec![DMatrix::zeros(0, 0); n + 1];
    let (mn, cn) = filter.filtered_with_prior(spec, n);
    mean[n] = mn.clone();
    cov[n] = cn.clone();
    for t in (0..n).rev() {
        let (m, c) = filter.filtered_with_prior(spec, t);
        let r_next = &filter.r[t];
        // gain = C G^T R^{-1}, computed as (R^{-1} G C)^T.
        let gain = solve_symmetric(r_next, &(&spec.g * c)).transpose();
        let s = m + &gain * (&mean[t + 1] - &filter.a[t]);
        let mut sc = c + &gain * (&cov[t + 1] - r_next) * gain.transpose();
        symmetrize(&mut sc);
        mean[t] = s;
        cov[t] = sc;
    }
    Smoothed { mean, cov }
}

/// Smoothed signal `F s_t` on the calendar of `y`.
pub fn smoothed_signal(spec: &DlmSpec, y: &TimeSeries) -> Result<TimeSeries> {
    let filter = kalman_filter(spec, y.values())?;
    let smoothed = kalman_smoother(spec, &filter);
    y.with_values(smoothed.mean[1..].iter().map(|s| spec.f.dot(s)).collect())
}
