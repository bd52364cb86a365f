use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::filter::{kalman_filter, FilterResult};
use super::linalg::{psd_factor, solve_symmetric, standard_normal_vector, symmetrize};
use super::spec::DlmSpec;
use crate::error::Result;

/// Draw `theta_0..=theta_n` from their joint posterior given `y`.
/// Deterministic for a given seed.
pub fn ffbs(spec: &DlmSpec, y: &[f64], seed: u64) -> Result<Vec<DVector<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ffbs_with_rng(spec, y, &mut rng)
}

pub fn ffbs_with_rng<R: Rng + ?Sized>(
    spec: &DlmSpec,
    y: &[f64],
    rng: &mut R,
) -> Result<Vec<DVector<f64>>> {
    let filter = kalman_filter(spec, y)?;
    Ok(backward_sample(spec, &filter, rng))
}

pub(crate) fn backward_sample<R: Rng + ?Sized>(
    spec: &DlmSpec,
    filter: &FilterResult,
    rng: &mut R,
) -> Vec<DVector<f64>> {
    let n = filter.len();
    let p = spec.state_dim();
    let mut path = vec![DVector::zeros(p); n + 1];

    let (mn, cn) = filter.filtered_with_prior(spec, n);
    path[n] = mn + psd_factor(cn) * standard_normal_vector(p, rng);
    for t in (0..n).rev() {
        let (m, c) = filter.filtered_with_prior(spec, t);
        let gc = &spec.g * c;
        let gain = solve_symmetric(&filter.r[t], &gc).transpose();
        let mean = m + &gain * (&path[t + 1] - &filter.a[t]);
        let mut cov = c - &gain * gc;
        symmetrize(&mut cov);
        path[t] = mean + psd_factor(&cov) * standard_normal_vector(p, rng);
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dlm::spec::build_trend_seasonal;
    use nalgebra::DMatrix;

    #[test]
    fn noiseless_model_samples_the_deterministic_path() {
        let m0 = DVector::from_row_slice(&[3.0, 0.25, 1.0, 0.5, -2.0]);
        let spec = build_trend_seasonal(m0.clone(), DMatrix::zeros(5, 5), 0.0, [0.0; 5]).unwrap();
        let mut state = m0.clone();
        let mut truth = vec![m0];
        let mut y = Vec::new();
        for _ in 0..10 {
            state = &spec.g * &state;
            y.push(spec.f.dot(&state));
            truth.push(state.clone());
        }
        for seed in 0..5 {
            let path = ffbs(&spec, &y, seed).unwrap();
            for (a, b) in path.iter().zip(&truth) {
                assert!((a - b).abs().max() < 1e-9);
            }
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let spec = build_trend_seasonal(
            DVector::zeros(5),
            DMatrix::identity(5, 5) * 100.0,
            1.0,
            [0.5, 0.1, 0.2, 0.0, 0.0],
        )
        .unwrap();
        let y: Vec<f64> = (0..16).map(|t| (t as f64 * 0.7).sin() * 3.0 + t as f64).collect();
        assert_eq!(ffbs(&spec, &y, 9).unwrap(), ffbs(&spec, &y, 9).unwrap());
        assert_ne!(ffbs(&spec, &y, 9).unwrap(), ffbs(&spec, &y, 10).unwrap());
    }
}
