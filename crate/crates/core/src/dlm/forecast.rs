use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::filter::kalman_filter;
use super::gibbs::GibbsChain;
use super::linalg::symmetrize;
use super::spec::{DlmSpec, TrendSeasonalTemplate};
use crate::error::{Error, Result};
use crate::metrics::ForecastResult;
use crate::series::TimeSeries;

/// Maximum number of posterior draws used as mixture components.
pub const MIXTURE_COMPONENTS: usize = 500;
/// Monte Carlo samples per component, capped by [`SAMPLE_BUDGET`].
const SAMPLES_PER_COMPONENT: usize = 2000;
const SAMPLE_BUDGET: usize = 1_000_000;

/// Predictive means and variances of `y_{n+1..=n+h}` given `y_{1..n}`.
pub fn predictive_moments(spec: &DlmSpec, y: &[f64], h: usize) -> Result<Vec<(f64, f64)>> {
    let filter = kalman_filter(spec, y)?;
    let (m, c) = filter.filtered_with_prior(spec, filter.len());
    let mut a: DVector<f64> = m.clone();
    let mut r: DMatrix<f64> = c.clone();
    let gt = spec.g.transpose();
    let mut out = Vec::with_capacity(h);
    for _ in 0..h {
        a = &spec.g * a;
        r = &spec.g * r * &gt + &spec.w;
        symmetrize(&mut r);
        let f = spec.f.dot(&a);
        let q = (spec.f.dot(&(&r * &spec.f)) + spec.v).max(0.0);
        out.push((f, q));
    }
    Ok(out)
}

/// Type-7 (linear interpolation) quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Equal-weight Gaussian mixture forecast over a set of specs.
///
/// The point forecast is the mixture mean; band limits are Monte Carlo
/// quantiles of the mixture.
pub fn forecast_mixture(
    specs: &[DlmSpec],
    y: &TimeSeries,
    h: usize,
    level: f64,
    seed: u64,
    label: &str,
) -> Result<ForecastResult> {
    if specs.is_empty() {
        return Err(Error::input("forecast mixture needs at least one component"));
    }
    if h < 1 {
        return Err(Error::input("forecast horizon must be at least 1"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::input(format!("interval level {level} outside (0, 1)")));
    }
    let moments = specs
        .iter()
        .map(|s| predictive_moments(s, y.values(), h))
        .collect::<Result<Vec<_>>>()?;

    let per_component = SAMPLES_PER_COMPONENT.min(SAMPLE_BUDGET / specs.len()).max(1);
    // The same standard normal draws serve every horizon, so band widths
    // move with the predictive variances rather than with sampling noise.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normals: Vec<f64> = (0..per_component * specs.len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let mut points = Vec::with_capacity(h);
    let mut lower = Vec::with_capacity(h);
    let mut upper = Vec::with_capacity(h);
    let mut samples = Vec::with_capacity(per_component * specs.len());
    for step in 0..h {
        samples.clear();
        let mut mean = 0.0;
        for (comp, z) in moments.iter().zip(normals.chunks(per_component)) {
            let (f, q) = comp[step];
            mean += f;
            let sd = q.sqrt();
            samples.extend(z.iter().map(|z| f + sd * z));
        }
        mean /= moments.len() as f64;
        samples.sort_by(f64::total_cmp);
        let lo = quantile_sorted(&samples, (1.0 - level) / 2.0);
        let hi = quantile_sorted(&samples, (1.0 + level) / 2.0);
        points.push(mean);
        lower.push(lo.min(mean));
        upper.push(hi.max(mean));
    }
    let origin = y.period_at(y.len());
    let calendar = |v| TimeSeries::new(v, origin, y.period_length());
    ForecastResult::new(calendar(points)?, calendar(lower)?, calendar(upper)?, level, label)
}

/// Posterior predictive forecast from a Gibbs chain: retained draws are
/// thinned to at most [`MIXTURE_COMPONENTS`] equally spaced ones, each
/// defining one Gaussian component.
pub fn dlm_forecast(
    template: &TrendSeasonalTemplate,
    chain: &GibbsChain,
    y: &TimeSeries,
    h: usize,
    level: f64,
    seed: u64,
) -> Result<ForecastResult> {
    let kept = chain.retained();
    if kept.is_empty() {
        return Err(Error::input("Gibbs chain has no retained draws"));
    }
    let k = kept.len().min(MIXTURE_COMPONENTS);
    let specs = (0..k)
        .map(|i| template.build(kept[i * kept.len() / k].to_array()))
        .collect::<Result<Vec<_>>>()?;
    forecast_mixture(&specs, y, h, level, seed, "Dynamic linear model")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dlm::gibbs::Variances;
    use crate::dlm::spec::build_trend_seasonal;
    use crate::series::Period;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn series(v: Vec<f64>) -> TimeSeries {
        TimeSeries::quarterly(v, Period::new(2000, 1)).unwrap()
    }

    #[test]
    fn noiseless_forecast_is_deterministic_extrapolation() {
        let m0 = DVector::from_row_slice(&[5.0, 0.2, 1.0, -0.5, 0.25]);
        let spec = build_trend_seasonal(m0.clone(), DMatrix::zeros(5, 5), 0.0, [0.0; 5]).unwrap();
        let mut state = m0;
        let mut y = Vec::new();
        for _ in 0..8 {
            state = &spec.g * &state;
            y.push(spec.f.dot(&state));
        }
        let fc = forecast_mixture(&[spec.clone()], &series(y), 6, 0.95, 1, "dlm").unwrap();
        for step in 0..6 {
            state = &spec.g * &state;
            let want = spec.f.dot(&state);
            assert!((fc.points.values()[step] - want).abs() < 1e-9);
            assert!((fc.upper.values()[step] - fc.lower.values()[step]).abs() < 1e-9);
        }
        assert_eq!(fc.points.origin(), Period::new(2002, 1));
    }

    #[test]
    fn single_component_matches_gaussian_quantiles() {
        let spec = build_trend_seasonal(
            DVector::zeros(5),
            DMatrix::identity(5, 5) * 100.0,
            0.5,
            [0.2, 0.01, 0.05, 0.0, 0.0],
        )
        .unwrap();
        let y: Vec<f64> = (0..20).map(|t| t as f64 * 0.5 + [1.0, 0.0, -1.5, 0.5][t % 4]).collect();
        let moments = predictive_moments(&spec, &y, 4).unwrap();
        let fc = forecast_mixture(&[spec], &series(y), 4, 0.9, 17, "dlm").unwrap();
        let z = Normal::standard().inverse_cdf(0.95);
        for (step, (f, q)) in moments.iter().enumerate() {
            let sd = q.sqrt();
            assert!((fc.points.values()[step] - f).abs() < 1e-12);
            // Quantile standard error for 2000 draws at p = 0.05 is about 0.05 sd.
            assert!((fc.upper.values()[step] - (f + z * sd)).abs() < 0.2 * sd);
            assert!((fc.lower.values()[step] - (f - z * sd)).abs() < 0.2 * sd);
        }
    }

    #[test]
    fn empty_chain_is_rejected() {
        let chain = GibbsChain { draws: vec![], n_iter: 0, burn_in: 0, seed: 0 };
        let t = TrendSeasonalTemplate::diffuse(1.0);
        assert!(dlm_forecast(&t, &chain, &series(vec![1.0; 8]), 4, 0.95, 0).unwrap_err().is_input());
    }

    #[test]
    fn thinning_caps_components() {
        let chain = GibbsChain {
            draws: vec![Variances::from_array([0.1, 0.01, 0.001, 0.01]); 1200],
            n_iter: 1200,
            burn_in: 200,
            seed: 0,
        };
        let y: Vec<f64> = (0..16).map(|t| 3.0 + 0.1 * t as f64 + [0.2, -0.1, -0.2, 0.1][t % 4]).collect();
        let fc = dlm_forecast(&TrendSeasonalTemplate::diffuse(y[0]), &chain, &series(y), 8, 0.95, 3).unwrap();
        let widths: Vec<f64> = fc.upper.values().iter().zip(fc.lower.values()).map(|(u, l)| u - l).collect();
        assert!(widths.windows(2).all(|w| w[1] >= w[0]), "{widths:?}");
    }
}
