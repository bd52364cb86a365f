//! Generates the bundled GDP-like fixture `data/gdp_fixture.csv`.
//!
//! The log level is a local linear trend with a slowly drifting quarterly
//! seasonal pattern, small observation noise, and two recession shocks:
//! a sharp fall in 2008-Q4/2009-Q1 and a prolonged contraction through
//! 2015-2016.
//!
//! ```text
//! cargo run -p gdpcast --example make_fixture > crates/cli/data/gdp_fixture.csv
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub const SEED: u64 = 1996;

/// Log-scale growth shock for quarter `q` (1-based) of `year`.
fn shock(year: i32, q: u32) -> f64 {
    match (year, q) {
        (2008, 4) => -0.040,
        (2009, 1) => -0.025,
        (2014, 4) => -0.008,
        (2015, _) | (2016, 1) | (2016, 2) => -0.014,
        (2016, _) => -0.006,
        _ => 0.0,
    }
}

pub fn fixture_csv() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let obs = Normal::new(0.0, 0.004).unwrap();
    let slope_noise = Normal::new(0.0, 0.0008).unwrap();
    let season_noise = Normal::new(0.0, 0.0015).unwrap();

    let mut level = 200_000f64.ln();
    let mut slope = 0.0065;
    let mut season = [-0.035, 0.012, 0.030, -0.007];
    let mut out = String::from("date,value\n");
    for year in 1996..=2019 {
        for q in 1..=4u32 {
            let i = (q - 1) as usize;
            let value = (level + season[i] + obs.sample(&mut rng)).exp();
            out.push_str(&format!("{year}-Q{q},{value:.1}\n"));

            slope += slope_noise.sample(&mut rng);
            slope = 0.0065 + 0.9 * (slope - 0.0065);
            level += slope + shock(year, q);
            season[i] += season_noise.sample(&mut rng);
            let mean = season.iter().sum::<f64>() / 4.0;
            season.iter_mut().for_each(|s| *s -= mean);
        }
    }
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", fixture_csv());
}
