use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::ffbs::backward_sample;
use super::filter::kalman_filter;
use super::spec::TrendSeasonalTemplate;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Draw from the inverse gamma distribution with density proportional to
/// `x^(-shape-1) exp(-rate / x)`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()) {
        return Err(Error::input(format!(
            "inverse gamma needs positive finite shape and rate, got ({shape}, {rate})"
        )));
    }
    let gamma = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(1.0 / gamma.sample(rng))
}

/// Hyperparameters `(a, b)` of one variance's prior. The full conditional is
/// `IG(a^2/b + n/2, a/b + SS/2)`, i.e. the precision has a gamma prior with
/// mean `a` and variance `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub a: f64,
    pub b: f64,
}

impl PriorSpec {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::input(format!("prior hyperparameters must be positive, got a={a}, b={b}")));
        }
        Ok(PriorSpec { a, b })
    }

    pub fn shape(&self) -> f64 {
        self.a * self.a / self.b
    }

    pub fn rate(&self) -> f64 {
        self.a / self.b
    }

    /// Variance implied by the prior precision mean, used to start the chain.
    pub fn initial_variance(&self) -> f64 {
        1.0 / self.a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariancePriors {
    pub obs: PriorSpec,
    pub level: PriorSpec,
    pub slope: PriorSpec,
    pub seasonal: PriorSpec,
}

impl VariancePriors {
    pub fn uniform(prior: PriorSpec) -> Self {
        VariancePriors {
            obs: prior,
            level: prior,
            slope: prior,
            seasonal: prior,
        }
    }

    /// Vague priors on the scale of the data: every precision has mean
    /// `1 / var(diff(y))` and shape `1e-3`.
    pub fn vague_for(y: &[f64]) -> Result<Self> {
        if y.len() < 3 {
            return Err(Error::input("need at least three observations to scale priors"));
        }
        let d: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (d.len() - 1) as f64;
        let var = if var > 0.0 && var.is_finite() { var } else { 1.0 };
        let a = 1.0 / var;
        Ok(Self::uniform(PriorSpec::new(a, 1e3 * a * a)?))
    }

    fn as_array(&self) -> [PriorSpec; 4] {
        [self.obs, self.level, self.slope, self.seasonal]
    }
}

/// Observation, level, slope and seasonal variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Variances {
    pub obs: f64,
    pub level: f64,
    pub slope: f64,
    pub seasonal: f64,
}

impl Variances {
    pub fn to_array(self) -> [f64; 4] {
        [self.obs, self.level, self.slope, self.seasonal]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Variances {
            obs: v[0],
            level: v[1],
            slope: v[2],
            seasonal: v[3],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GibbsConfig {
    pub n_iter: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Prior on `theta_0`; defaults to [`TrendSeasonalTemplate::diffuse`]
    /// centred on the first observation.
    pub template: Option<TrendSeasonalTemplate>,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        GibbsConfig {
            n_iter: 5000,
            burn_in: 1000,
            seed: 0,
            template: None,
        }
    }
}

/// Every draw of the sampler, burn-in included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsChain {
    pub draws: Vec<Variances>,
    pub n_iter: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl GibbsChain {
    /// Draws after the burn-in period.
    pub fn retained(&self) -> &[Variances] {
        &self.draws[self.burn_in.min(self.draws.len())..]
    }

    pub fn posterior_mean(&self) -> Option<Variances> {
        let kept = self.retained();
        if kept.is_empty() {
            return None;
        }
        let mut acc = [0.0; 4];
        for d in kept {
            for (a, v) in acc.iter_mut().zip(d.to_array()) {
                *a += v;
            }
        }
        Some(Variances::from_array(acc.map(|a| a / kept.len() as f64)))
    }

    /// Retained draws as CSV, `iter` counting from 1 over all iterations.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("iter,sigma2,sigma2_mu,sigma2_beta,sigma2_gamma\n");
        for (i, d) in self.retained().iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                self.burn_in + i + 1,
                d.obs,
                d.level,
                d.slope,
                d.seasonal
            );
        }
        out
    }

    /// Parse the CSV written by [`GibbsChain::to_csv_string`]. Only the
    /// retained draws are stored there, so the result has `burn_in` set
    /// from the first iteration number and no burn-in draws.
    pub fn from_csv_str(text: &str, seed: u64) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::input("empty chain CSV"))?;
        if header.trim() != "iter,sigma2,sigma2_mu,sigma2_beta,sigma2_gamma" {
            return Err(Error::input(format!("unexpected chain header '{header}'")));
        }
        let mut draws = Vec::new();
        let mut first_iter = None;
        for line in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(Error::input(format!("chain row '{line}' must have 5 fields")));
            }
            let iter: usize = fields[0]
                .parse()
                .map_err(|_| Error::input(format!("bad iteration '{}'", fields[0])))?;
            first_iter.get_or_insert(iter);
            let mut v = [0.0; 4];
            for (slot, f) in v.iter_mut().zip(&fields[1..]) {
                *slot = f.parse().map_err(|_| Error::input(format!("bad draw '{f}'")))?;
            }
            draws.push(Variances::from_array(v));
        }
        let burn_in = first_iter.map_or(0, |i| i.saturating_sub(1));
        // Pad the burn-in so `retained()` sees exactly the parsed rows.
        let n_iter = burn_in + draws.len();
        let mut all = vec![Variances::from_array([f64::NAN; 4]); burn_in];
        all.extend(draws);
        Ok(GibbsChain {
            draws: all,
            n_iter,
            burn_in,
            seed,
        })
    }
}

/// Gibbs sampler for the four variances of the trend plus quarterly
/// seasonal DLM. Each sweep draws the state path by FFBS and then each
/// variance from its inverse gamma full conditional with shape
/// `a^2/b + n/2` and rate `a/b + SS/2`.
pub fn gibbs(y: &TimeSeries, priors: &VariancePriors, config: &GibbsConfig) -> Result<GibbsChain> {
    let obs = y.values();
    let n = obs.len();
    if n < 8 {
        return Err(Error::input(format!("Gibbs sampler needs at least 8 observations, got {n}")));
    }
    if config.n_iter <= config.burn_in {
        return Err(Error::input(format!(
            "n_iter ({}) must exceed burn_in ({})",
            config.n_iter, config.burn_in
        )));
    }
    let template = config
        .template
        .clone()
        .unwrap_or_else(|| TrendSeasonalTemplate::diffuse(obs[0]));
    let priors = priors.as_array();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut current = priors.map(|p| p.initial_variance());
    let mut draws = Vec::with_capacity(config.n_iter);
    let half_n = n as f64 / 2.0;

    for iter in 0..config.n_iter {
        let spec = template.build(current)?;
        let filter = kalman_filter(&spec, obs)?;
        let path = backward_sample(&spec, &filter, &mut rng);

        let mut ss = [0.0; 4];
        for t in 1..=n {
            let resid = obs[t - 1] - spec.f.dot(&path[t]);
            ss[0] += resid * resid;
            let pred = &spec.g * &path[t - 1];
            for i in 0..3 {
                ss[i + 1] += (path[t][i] - pred[i]).powi(2);
            }
        }
        if ss.iter().any(|s| !s.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite sum of squares at Gibbs iteration {iter}"
            )));
        }
        for k in 0..4 {
            let shape = priors[k].shape() + half_n;
            let rate = priors[k].rate() + 0.5 * ss[k];
            current[k] = sample_inverse_gamma(shape, rate, &mut rng)?;
        }
        draws.push(Variances::from_array(current));
    }
    Ok(GibbsChain {
        draws,
        n_iter: config.n_iter,
        burn_in: config.burn_in,
        seed: config.seed,
    })
}

/// Running means of each variance over the retained draws.
pub fn ergodic_means(chain: &GibbsChain) -> Vec<[f64; 4]> {
    let mut acc = [0.0; 4];
    chain
        .retained()
        .iter()
        .enumerate()
        .map(|(i, d)| {
            for (a, v) in acc.iter_mut().zip(d.to_array()) {
                *a += v;
            }
            acc.map(|a| a / (i + 1) as f64)
        })
        .collect()
}
