//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use gdpcast_core::dlm::DlmSpec;
use gdpcast_core::{Period, TimeSeries};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

pub fn normals<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Log density of `N(mean, cov)` at `x` by dense Cholesky.
pub fn mvn_logpdf(x: &DVector<f64>, mean: &DVector<f64>, cov: &DMatrix<f64>) -> f64 {
    let chol = cov.clone().cholesky().expect("covariance must be positive definite");
    let diff = x - mean;
    let z = chol.l().solve_lower_triangular(&diff).expect("triangular solve");
    let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
    -0.5 * (x.len() as f64 * LN_2PI + log_det + z.norm_squared())
}

/// Joint Gaussian of `(theta_0, ..., theta_n, y_1, ..., y_n)` written as a
/// linear map of the independent shocks `(theta_0, w_1..w_n, v_1..v_n)`.
pub struct DenseDlm {
    pub loglik: f64,
    /// `E[theta_t | y_1..y_n]`, t = 0..=n.
    pub smoothed: Vec<DVector<f64>>,
    /// `Cov[theta_t | y_1..y_n]`, t = 0..=n.
    pub smoothed_cov: Vec<DMatrix<f64>>,
}

pub fn dense_dlm(spec: &DlmSpec, y: &[f64]) -> DenseDlm {
    let p = spec.f.len();
    let n = y.len();
    let shocks = p + n * p + n;
    // theta_t = map[t] * shocks + mean_theta[t]
    let mut maps: Vec<DMatrix<f64>> = Vec::with_capacity(n + 1);
    let mut means: Vec<DVector<f64>> = Vec::with_capacity(n + 1);
    let mut m0 = DMatrix::zeros(p, shocks);
    for i in 0..p {
        m0[(i, i)] = 1.0;
    }
    maps.push(m0);
    means.push(spec.m0.clone());
    for t in 1..=n {
        let mut next = &spec.g * &maps[t - 1];
        for i in 0..p {
            next[(i, p + (t - 1) * p + i)] += 1.0;
        }
        maps.push(next);
        means.push(&spec.g * &means[t - 1]);
    }
    let mut shock_cov = DMatrix::zeros(shocks, shocks);
    shock_cov.view_mut((0, 0), (p, p)).copy_from(&spec.c0);
    for t in 0..n {
        shock_cov.view_mut((p + t * p, p + t * p), (p, p)).copy_from(&spec.w);
        shock_cov[(p + n * p + t, p + n * p + t)] = spec.v;
    }
    let mut y_map = DMatrix::zeros(n, shocks);
    let mut y_mean = DVector::zeros(n);
    for t in 1..=n {
        let row = spec.f.transpose() * &maps[t];
        y_map.row_mut(t - 1).copy_from(&row);
        y_map[(t - 1, p + n * p + t - 1)] += 1.0;
        y_mean[t - 1] = spec.f.dot(&means[t]);
    }
    let y_cov = &y_map * &shock_cov * y_map.transpose();
    let yv = DVector::from_column_slice(y);
    let loglik = mvn_logpdf(&yv, &y_mean, &y_cov);
    let y_inv = y_cov.clone().cholesky().expect("pd").inverse();
    let resid = &yv - &y_mean;
    let mut smoothed = Vec::with_capacity(n + 1);
    let mut smoothed_cov = Vec::with_capacity(n + 1);
    for t in 0..=n {
        let cross = &maps[t] * &shock_cov * y_map.transpose();
        smoothed.push(&means[t] + &cross * &y_inv * &resid);
        let prior = &maps[t] * &shock_cov * maps[t].transpose();
        smoothed_cov.push(prior - &cross * &y_inv * cross.transpose());
    }
    DenseDlm {
        loglik,
        smoothed,
        smoothed_cov,
    }
}

/// Random PSD matrix `A A^T + jitter I`.
pub fn random_psd<R: Rng>(p: usize, scale: f64, jitter: f64, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(p, p, |_, _| scale * rng.random_range(-1.0..1.0));
    &a * a.transpose() + DMatrix::identity(p, p) * jitter
}

/// Simulate `n` observations and the states `theta_0..theta_n`.
pub fn simulate_dlm<R: Rng>(spec: &DlmSpec, n: usize, rng: &mut R) -> (Vec<f64>, Vec<DVector<f64>>) {
    let p = spec.f.len();
    let draw = |cov: &DMatrix<f64>, rng: &mut R| -> DVector<f64> {
        let l = gdpcast_core::dlm::psd_factor(cov);
        let z = DVector::from_vec(normals(p, rng));
        l * z
    };
    let mut states = vec![&spec.m0 + draw(&spec.c0, rng)];
    let mut y = Vec::with_capacity(n);
    for t in 1..=n {
        let next = &spec.g * &states[t - 1] + draw(&spec.w, rng);
        let noise: f64 = StandardNormal.sample(rng);
        y.push(spec.f.dot(&next) + spec.v.sqrt() * noise);
        states.push(next);
    }
    (y, states)
}

/// Additive or multiplicative Holt–Winters written out directly from the
/// textbook recursions with explicit time indices.
#[allow(clippy::too_many_arguments)]
pub fn hw_reference(
    y: &[f64],
    m: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    multiplicative: bool,
    level0: f64,
    trend0: f64,
    seasonal0: &[f64],
) -> (Vec<f64>, f64) {
    let n = y.len();
    let mut l = vec![0.0; n + 1];
    let mut b = vec![0.0; n + 1];
    // s[k] holds the seasonal index for time k - m + 1 .. with offset m
    let mut s = vec![0.0; n + m];
    l[0] = level0;
    b[0] = trend0;
    s[..m].copy_from_slice(seasonal0);
    let mut fitted = Vec::with_capacity(n);
    for t in 1..=n {
        let st_m = s[t - 1];
        let yt = y[t - 1];
        if multiplicative {
            fitted.push((l[t - 1] + b[t - 1]) * st_m);
            l[t] = alpha * yt / st_m + (1.0 - alpha) * (l[t - 1] + b[t - 1]);
            b[t] = beta * (l[t] - l[t - 1]) + (1.0 - beta) * b[t - 1];
            s[t - 1 + m] = gamma * yt / (l[t - 1] + b[t - 1]) + (1.0 - gamma) * st_m;
        } else {
            fitted.push(l[t - 1] + b[t - 1] + st_m);
            l[t] = alpha * (yt - st_m) + (1.0 - alpha) * (l[t - 1] + b[t - 1]);
            b[t] = beta * (l[t] - l[t - 1]) + (1.0 - beta) * b[t - 1];
            s[t - 1 + m] = gamma * (yt - l[t - 1] - b[t - 1]) + (1.0 - gamma) * st_m;
        }
    }
    let sse = y.iter().zip(&fitted).map(|(a, f)| (a - f).powi(2)).sum();
    (fitted, sse)
}

/// Simulate `n` values of `(1 - B)(1 - B^4) y_t = (1 + theta B)(1 + Theta B^4) e_t`
/// after a burn-in, starting from zeros.
pub fn simulate_airline<R: Rng>(n: usize, theta: f64, seasonal_theta: f64, sigma: f64, rng: &mut R) -> Vec<f64> {
    let burn = 100;
    let total = n + burn;
    let e: Vec<f64> = normals(total, rng).into_iter().map(|z| sigma * z).collect();
    let mut w = vec![0.0; total];
    for t in 0..total {
        let lag = |k: usize| if t >= k { e[t - k] } else { 0.0 };
        w[t] = e[t] + theta * lag(1) + seasonal_theta * lag(4) + theta * seasonal_theta * lag(5);
    }
    let mut y = vec![0.0; total];
    for t in 0..total {
        let lag = |k: usize| if t >= k { y[t - k] } else { 0.0 };
        y[t] = w[t] + lag(1) + lag(4) - lag(5);
    }
    y[burn..].to_vec()
}

/// Theoretical autocovariances `gamma_0..gamma_{lags}` of an ARMA process
/// `(1 - sum ar B^k) x = (1 + sum ma B^k) e`, from its long MA expansion.
pub fn arma_autocovariance(ar: &[f64], ma: &[f64], sigma2: f64, lags: usize) -> Vec<f64> {
    let terms = 4000;
    let mut psi = vec![0.0; terms];
    for j in 0..terms {
        let mut v = if j == 0 { 1.0 } else { ma.get(j - 1).copied().unwrap_or(0.0) };
        for (k, a) in ar.iter().enumerate() {
            if j > k {
                v += a * psi[j - k - 1];
            }
        }
        psi[j] = v;
    }
    (0..=lags)
        .map(|h| sigma2 * (0..terms - h).map(|j| psi[j] * psi[j + h]).sum::<f64>())
        .collect()
}

/// Random DLM with state dimension 1 to 3.
pub fn random_dlm_spec<R: Rng>(rng: &mut R) -> DlmSpec {
    let p = rng.random_range(1..=3);
    let f = DVector::from_fn(p, |_, _| rng.random_range(-1.5..1.5));
    let g = DMatrix::from_fn(p, p, |_, _| rng.random_range(-1.2..1.2));
    let v = rng.random_range(0.05..2.0);
    let w = random_psd(p, 0.8, 0.01, rng);
    let m0 = DVector::from_fn(p, |_, _| rng.random_range(-2.0..2.0));
    let c0 = random_psd(p, 1.5, 0.05, rng);
    DlmSpec::new(f, g, v, w, m0, c0).unwrap()
}

/// Quarterly level + slope + seasonal series of length 8 to 60.
pub fn random_hw_series<R: Rng>(rng: &mut R) -> TimeSeries {
    let n = rng.random_range(8..=60);
    let level = rng.random_range(20.0..200.0);
    let slope = rng.random_range(-0.5..1.5);
    let amp = rng.random_range(0.0..10.0);
    let values = (0..n)
        .map(|t| {
            let season = amp * [1.0, -0.4, -1.2, 0.6][t % 4];
            level + slope * t as f64 + season + rng.random_range(-2.0..2.0)
        })
        .collect();
    TimeSeries::quarterly(values, Period::new(2001, 1)).unwrap()
}
