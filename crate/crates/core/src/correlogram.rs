//! Sample autocorrelation and partial autocorrelation.

use crate::error::{Error, Result};

/// Biased (divisor `n`) sample autocovariances at lags `0..=max_lag`.
pub fn autocovariance(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = x.len();
    if max_lag >= n {
        return Err(Error::input(format!(
            "max_lag {max_lag} must be smaller than the series length {n}"
        )));
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    Ok((0..=max_lag)
        .map(|k| {
            centered[k..]
                .iter()
                .zip(&centered)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect())
}

/// Sample autocorrelations at lags `0..=max_lag`; `acf[0] == 1`.
pub fn acf(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let gamma = autocovariance(x, max_lag)?;
    let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if gamma[0] <= 1e-24 * scale * scale {
        return Err(Error::DegenerateVariance);
    }
    let g0 = gamma[0];
    let mut rho: Vec<f64> = gamma.into_iter().map(|g| g / g0).collect();
    rho[0] = 1.0;
    Ok(rho)
}

/// Partial autocorrelations from autocorrelations by the Durbin–Levinson
/// recursion. `rho[0]` must be 1; the result has the same length with
/// `pacf[0] = 1`.
pub fn durbin_levinson(rho: &[f64]) -> Vec<f64> {
    let max_lag = rho.len().saturating_sub(1);
    let mut pacf = vec![1.0; rho.len()];
    let mut phi: Vec<f64> = Vec::with_capacity(max_lag);
    for k in 1..=max_lag {
        let num = rho[k] - phi.iter().enumerate().map(|(j, p)| p * rho[k - 1 - j]).sum::<f64>();
        let den = 1.0 - phi.iter().enumerate().map(|(j, p)| p * rho[j + 1]).sum::<f64>();
        let kk = if den.abs() < f64::EPSILON { 0.0 } else { num / den };
        let prev = phi.clone();
        for j in 0..prev.len() {
            phi[j] = prev[j] - kk * prev[prev.len() - 1 - j];
        }
        phi.push(kk);
        pacf[k] = kk;
    }
    pacf
}

/// Sample partial autocorrelations at lags `0..=max_lag`.
pub fn pacf(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    Ok(durbin_levinson(&acf(x, max_lag)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::with_capacity(n);
        let mut prev = 0.0;
        for _ in 0..n + 200 {
            let e: f64 = StandardNormal.sample(&mut rng);
            prev = phi * prev + e;
            x.push(prev);
        }
        x.split_off(200)
    }

    /// Last Yule-Walker coefficient at each order, solved directly.
    fn yule_walker_pacf(rho: &[f64]) -> Vec<f64> {
        let mut out = vec![1.0];
        for k in 1..rho.len() {
            let toeplitz = DMatrix::from_fn(k, k, |i, j| rho[i.abs_diff(j)]);
            let rhs = DVector::from_fn(k, |i, _| rho[i + 1]);
            let sol = toeplitz.lu().solve(&rhs).unwrap();
            out.push(sol[k - 1]);
        }
        out
    }

    #[test]
    fn lag_zero_is_one() {
        let r = acf(&[1.0, 3.0, 2.0, 5.0], 2).unwrap();
        assert_eq!(r[0], 1.0);
        assert_eq!(pacf(&[1.0, 3.0, 2.0, 5.0], 2).unwrap()[0], 1.0);
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert_eq!(acf(&[2.0; 10], 3), Err(Error::DegenerateVariance));
        assert!(acf(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn ar1_correlogram() {
        let x = ar1(0.5, 10_000, 7);
        let r = acf(&x, 5).unwrap();
        let p = pacf(&x, 5).unwrap();
        assert!((r[1] - 0.5).abs() < 0.03, "acf[1] = {}", r[1]);
        assert!(p[2].abs() < 0.03, "pacf[2] = {}", p[2]);
    }

    #[test]
    fn white_noise_pacf_band() {
        let x = ar1(0.0, 10_000, 11);
        let p = pacf(&x, 40).unwrap();
        let band = 2.0 / (x.len() as f64).sqrt();
        let inside = p[1..].iter().filter(|v| v.abs() <= band).count();
        assert!(inside as f64 >= 0.93 * 40.0, "{inside} of 40 inside band");
    }

    #[test]
    fn autocovariance_toeplitz_is_psd() {
        for seed in 0..20 {
            let x = ar1(0.8, 50, seed);
            let g = autocovariance(&x, 5).unwrap();
            let t = DMatrix::from_fn(6, 6, |i, j| g[i.abs_diff(j)]);
            let min = t.symmetric_eigenvalues().min();
            assert!(min >= -1e-10, "min eigenvalue {min}");
        }
    }

    proptest! {
        #[test]
        fn durbin_levinson_matches_yule_walker(seed in 0u64..10_000, phi in -0.9f64..0.9) {
            let x = ar1(phi, 120, seed);
            let r = acf(&x, 8).unwrap();
            prop_assert!(r.iter().all(|v| (-1.0..=1.0).contains(v)));
            let dl = durbin_levinson(&r);
            let yw = yule_walker_pacf(&r);
            for (a, b) in dl.iter().zip(&yw) {
                prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
            }
        }
    }
}
