mod support;

use gdpcast_core::holt_winters::{hw_filter, hw_initial_state, hw_optimize, HwParams, Method};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{hw_reference, random_hw_series};

#[test]
fn filter_matches_reference_recursion() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for case in 0..100 {
        let s = random_hw_series(&mut rng);
        let method = if case % 2 == 0 { Method::Additive } else { Method::Multiplicative };
        let (a, b, g) = (rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());
        let init = hw_initial_state(&s, method).unwrap();
        let fit = hw_filter(&s, HwParams::new(a, b, g, method).unwrap(), &init).unwrap();
        let (fitted, sse) = hw_reference(
            s.values(),
            4,
            a,
            b,
            g,
            method == Method::Multiplicative,
            init.level,
            init.trend,
            &init.seasonal,
        );
        for (x, y) in fit.fitted.values().iter().zip(&fitted) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0), "case {case}: {x} vs {y}");
        }
        assert!((fit.sse - sse).abs() <= 1e-12 * sse.max(1.0), "case {case}");
    }
}

#[test]
fn optimum_beats_fine_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for case in 0..4 {
        let s = random_hw_series(&mut rng);
        if s.len() < 12 {
            continue;
        }
        let method = if case % 2 == 0 { Method::Additive } else { Method::Multiplicative };
        let fit = hw_optimize(&s, method).unwrap();
        let init = hw_initial_state(&s, method).unwrap();
        for i in 0..=10 {
            for j in 0..=10 {
                for k in 0..=10 {
                    let p = HwParams::new(i as f64 / 10.0, j as f64 / 10.0, k as f64 / 10.0, method).unwrap();
                    let sse = hw_filter(&s, p, &init).unwrap().sse;
                    assert!(fit.sse <= sse * (1.0 + 1e-12), "case {case} grid ({i},{j},{k})");
                }
            }
        }
    }
}
