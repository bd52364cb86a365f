mod support;

use gdpcast_core::dlm::kalman_filter;
use gdpcast_core::sarima::{fit, forecast, grid_search, loglik, to_state_space, SarimaOrder, SarimaParams};
use gdpcast_core::{Period, TimeSeries};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use support::{arma_autocovariance, mvn_logpdf, normals, simulate_airline};

fn q(values: Vec<f64>) -> TimeSeries {
    TimeSeries::quarterly(values, Period::new(1980, 1)).unwrap()
}

fn dense_loglik(order: &SarimaOrder, params: &SarimaParams, w: &[f64]) -> f64 {
    let (ar, ma) = params.expanded(order);
    let acv = arma_autocovariance(&ar, &ma, params.sigma2, w.len());
    let n = w.len();
    let cov = DMatrix::from_fn(n, n, |i, j| acv[i.abs_diff(j)]);
    mvn_logpdf(&DVector::from_column_slice(w), &DVector::zeros(n), &cov)
}

#[test]
fn arma11_loglik_matches_dense_oracle() {
    let order = SarimaOrder::new((1, 0, 1), (0, 0, 0), 4).unwrap();
    let params = SarimaParams {
        phi: vec![0.6],
        theta: vec![0.3],
        ..SarimaParams::zeros(&order, 1.7)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let w = normals(8, &mut rng);
    let got = loglik(&order, &params, &q(w.clone())).unwrap();
    assert!((got - dense_loglik(&order, &params, &w)).abs() < 1e-7);
}

#[test]
fn every_grid_order_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for p in 0..2 {
        for q_ in 0..2 {
            for sp in 0..2 {
                for sq in 0..2 {
                    let order = SarimaOrder::new((p, 0, q_), (sp, 0, sq), 4).unwrap();
                    let mut coef = |k: usize| (0..k).map(|_| rng.random_range(-0.7..0.7)).collect::<Vec<f64>>();
                    let params = SarimaParams {
                        phi: coef(p),
                        theta: coef(q_),
                        seasonal_phi: coef(sp),
                        seasonal_theta: coef(sq),
                        sigma2: 0.5 + rng.random::<f64>(),
                    };
                    for n in [6, 10] {
                        let w = normals(n, &mut rng);
                        let got = loglik(&order, &params, &q(w.clone())).unwrap();
                        let want = dense_loglik(&order, &params, &w);
                        assert!((got - want).abs() < 1e-7, "{order} n={n}: {got} vs {want}");
                    }
                }
            }
        }
    }
}

#[test]
fn ima_estimate_is_consistent() {
    let order = SarimaOrder::new((0, 1, 1), (0, 0, 0), 4).unwrap();
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
        let e = normals(2001, &mut rng);
        let mut y = vec![0.0];
        for t in 1..2001 {
            let prev = y[t - 1];
            y.push(prev + e[t] + 0.6 * e[t - 1]);
        }
        let m = fit(&order, &q(y)).unwrap();
        assert!((m.params.theta[0] - 0.6).abs() < 0.05, "seed {seed}: {}", m.params.theta[0]);
        assert!((m.params.sigma2 - 1.0).abs() < 0.1);
    }
}

#[test]
fn forecast_mean_matches_simulated_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let y = simulate_airline(120, 0.4, 0.6, 1.0, &mut rng);
    let s = q(y.clone());
    let order = SarimaOrder::new((0, 1, 1), (0, 1, 1), 4).unwrap();
    let model = fit(&order, &s).unwrap();
    let h = 8;
    let fc = forecast(&model, &s, h, 0.95).unwrap();

    let spec = to_state_space(&order, &model.params).unwrap();
    let w: Vec<f64> = (5..y.len()).map(|t| y[t] - y[t - 1] - y[t - 4] + y[t - 5]).collect();
    let filter = kalman_filter(&spec, &w).unwrap();
    let m_n = filter.m.last().unwrap().clone();
    let c_n = filter.c.last().unwrap().clone();
    let l = gdpcast_core::dlm::psd_factor(&c_n);
    let loading = {
        let mut r = DVector::zeros(spec.f.len());
        r[0] = 1.0;
        let (_, ma) = model.params.expanded(&order);
        for (i, c) in ma.iter().enumerate() {
            r[i + 1] = *c;
        }
        r
    };
    let sigma = model.params.sigma2.sqrt();
    let paths = 200_000;
    let mut sum = vec![0.0; h];
    let mut sum_sq = vec![0.0; h];
    let dim = spec.f.len();
    for _ in 0..paths {
        let z = DVector::from_vec(normals(dim, &mut rng));
        let mut state = &m_n + &l * z;
        let mut hist: Vec<f64> = y[y.len() - 5..].to_vec();
        for k in 0..h {
            let eps: f64 = StandardNormal.sample(&mut rng);
            state = &spec.g * state + &loading * (sigma * eps);
            let n = hist.len();
            let next = state[0] + hist[n - 1] + hist[n - 4] - hist[n - 5];
            hist.push(next);
            sum[k] += next;
            sum_sq[k] += next * next;
        }
    }
    let np = paths as f64;
    for k in 0..h {
        let mean = sum[k] / np;
        let se = ((sum_sq[k] / np - mean * mean) / np).sqrt();
        let point = fc.points.values()[k];
        assert!((mean - point).abs() < 3.0 * se, "h={}: {mean} vs {point} (se {se})", k + 1);
    }
}

#[test]
fn aic_ranking_is_scale_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let y = simulate_airline(160, 0.4, 0.6, 1.0, &mut rng);
    let c: f64 = 37.5;
    let a = grid_search(&q(y.clone()), 1, 1, 4).unwrap();
    let b = grid_search(&q(y.iter().map(|v| v * c).collect()), 1, 1, 4).unwrap();
    assert_eq!(a.ranked.len(), 16);
    assert_eq!(a.best().order, b.best().order);
    let n = a.best().n_used as f64;
    let shift = 2.0 * n * c.ln();
    for ma in &a.ranked {
        let mb = b.ranked.iter().find(|m| m.order == ma.order).unwrap();
        assert!((mb.aic - ma.aic - shift).abs() < 1e-5 * ma.aic.abs().max(1.0), "{}", ma.order);
    }
}

#[test]
fn bands_widen_for_integrated_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let s = q(simulate_airline(80, 0.2, -0.5, 2.0, &mut rng));
    for order in [
        SarimaOrder::new((1, 1, 0), (0, 0, 1), 4).unwrap(),
        SarimaOrder::new((0, 1, 1), (1, 1, 0), 4).unwrap(),
        SarimaOrder::new((1, 0, 1), (0, 1, 1), 4).unwrap(),
    ] {
        let m = fit(&order, &s).unwrap();
        let f = forecast(&m, &s, 16, 0.95).unwrap();
        let widths: Vec<f64> = f.upper.values().iter().zip(f.lower.values()).map(|(u, l)| u - l).collect();
        assert!(widths.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{order}");
    }
}
