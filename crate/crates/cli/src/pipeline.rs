use std::fmt::Write as _;

use gdpcast_core::correlogram::{acf, pacf};
use gdpcast_core::dlm::{
    dlm_forecast, gibbs, smoothed_signal, GibbsChain, GibbsConfig, TrendSeasonalTemplate, Variances,
    VariancePriors,
};
use gdpcast_core::holt_winters::{hw_forecast, hw_optimize, HwFit, Method};
use gdpcast_core::hypothesis::{ljung_box, phillips_perron, TestResult, LEVELS};
use gdpcast_core::metrics::{compare, growth_rate, score, ForecastResult, ScoreCard};
use gdpcast_core::sarima::{self, fitted_values, grid_search, GridReport, SarimaModel};
use gdpcast_core::transform::{difference, exp_transform, log_transform};
use gdpcast_core::TimeSeries;
use serde::{Deserialize, Serialize};

use crate::config::{ModelKind, RunConfig, Transform};
use crate::error::{CliError, CliResult, Context};
use crate::files::{read_json, read_series, read_text, write_json, write_text, Layout};

/// The observed series split at `train_end`.
pub struct Data {
    pub full: TimeSeries,
    pub train: TimeSeries,
    /// Observations after `train_end`, if any.
    pub test: Option<TimeSeries>,
    /// `train` on the modelling scale.
    pub model_scale: TimeSeries,
}

pub fn load_data(cfg: &RunConfig) -> CliResult<Data> {
    let full = read_series(&cfg.input)?;
    let idx = full.index_of(cfg.train_end).ok_or_else(|| {
        CliError::input(
            "config",
            format!(
                "train_end {} outside the data range {}..{}",
                cfg.train_end,
                full.origin(),
                full.end()
            ),
        )
    })?;
    if idx + 1 >= full.len() {
        return Err(CliError::input(
            "config",
            format!("train_end {} must fall before the last observation {}", cfg.train_end, full.end()),
        ));
    }
    let train = full.until(cfg.train_end).context("ts-core::split")?;
    let test = Some(full.after(cfg.train_end).context("ts-core::split")?);
    let model_scale = to_model_scale(cfg, &train)?;
    Ok(Data {
        full,
        train,
        test,
        model_scale,
    })
}

fn to_model_scale(cfg: &RunConfig, s: &TimeSeries) -> CliResult<TimeSeries> {
    match cfg.transform {
        Transform::Log => log_transform(s).context("ts-core::log_transform"),
        Transform::None => Ok(s.clone()),
    }
}

fn from_model_scale(cfg: &RunConfig, s: &TimeSeries) -> CliResult<TimeSeries> {
    match cfg.transform {
        Transform::Log => exp_transform(s).context("ts-core::exp_transform"),
        Transform::None => Ok(s.clone()),
    }
}

fn forecast_to_original(cfg: &RunConfig, f: ForecastResult) -> CliResult<ForecastResult> {
    match cfg.transform {
        Transform::Log => f.map_monotone(f64::exp).context("metrics::back_transform"),
        Transform::None => Ok(f),
    }
}

/// Saved posterior of the DLM variances plus the state prior it used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DlmArtifact {
    pub template: TrendSeasonalTemplate,
    pub posterior_mean: Variances,
    pub n_iter: usize,
    pub burn_in: usize,
    pub seed: u64,
}

struct HwOutcome {
    candidates: Vec<HwFit>,
    best: usize,
}

struct SarimaOutcome {
    grid: GridReport,
    fitted: TimeSeries,
    residuals: Vec<f64>,
}

struct DlmOutcome {
    chain: GibbsChain,
    artifact: DlmArtifact,
    fitted: TimeSeries,
}

fn fit_hw(z: &TimeSeries) -> CliResult<HwOutcome> {
    let candidates = vec![
        hw_optimize(z, Method::Additive).context("holt-winters::hw_optimize(additive)")?,
        hw_optimize(z, Method::Multiplicative).context("holt-winters::hw_optimize(multiplicative)")?,
    ];
    let best = if candidates[1].sse < candidates[0].sse { 1 } else { 0 };
    Ok(HwOutcome { candidates, best })
}

fn fit_sarima(z: &TimeSeries) -> CliResult<SarimaOutcome> {
    let grid = grid_search(z, 1, 1, z.period_length()).context("sarima::grid_search")?;
    let (fitted, residuals) = fitted_values(grid.best(), z).context("sarima::fitted_values")?;
    Ok(SarimaOutcome {
        grid,
        fitted,
        residuals,
    })
}

fn fit_dlm(cfg: &RunConfig, z: &TimeSeries) -> CliResult<DlmOutcome> {
    let priors = VariancePriors::vague_for(z.values()).context("dlm::priors")?;
    let template = TrendSeasonalTemplate::diffuse(z.values()[0]);
    let config = GibbsConfig {
        n_iter: cfg.gibbs_iter,
        burn_in: cfg.gibbs_burn,
        seed: cfg.seed,
        template: Some(template.clone()),
    };
    let chain = gibbs(z, &priors, &config).context("dlm::gibbs")?;
    let posterior_mean = chain
        .posterior_mean()
        .ok_or_else(|| CliError::input("dlm::gibbs", "no retained draws"))?;
    let spec = template.build(posterior_mean.to_array()).context("dlm::build")?;
    let fitted = smoothed_signal(&spec, z).context("dlm::smoother")?;
    Ok(DlmOutcome {
        chain,
        artifact: DlmArtifact {
            template,
            posterior_mean,
            n_iter: cfg.gibbs_iter,
            burn_in: cfg.gibbs_burn,
            seed: cfg.seed,
        },
        fitted,
    })
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Additive => "additive",
        Method::Multiplicative => "multiplicative",
    }
}

fn series_csv(s: &TimeSeries) -> String {
    s.to_csv_string()
}

fn test_rows(out: &mut String, test: &str, series: &str, r: &TestResult) {
    let _ = write!(out, "{test},{series},{},{},{}", r.statistic, r.p_value, r.lags_used);
    for level in LEVELS {
        let flag = r.rejects(level).unwrap_or(false);
        let _ = write!(out, ",{flag}");
    }
    out.push('\n');
}

fn tests_header() -> String {
    let mut h = String::from("test,series,statistic,p_value,lags");
    for level in LEVELS {
        let _ = write!(h, ",reject_{level}");
    }
    h.push('\n');
    h
}

fn correlogram_rows(out: &mut String, name: &str, x: &[f64], lags: usize) -> CliResult<()> {
    let lags = lags.min(x.len().saturating_sub(1));
    let r = acf(x, lags).context("ts-core::acf")?;
    let p = pacf(x, lags).context("ts-core::pacf")?;
    for k in 1..=lags {
        let _ = writeln!(out, "{name},{},{k},{},{}", x.len(), r[k], p[k]);
    }
    Ok(())
}

/// Fit every selected model on the training window and write the fit
/// artifacts, the fitted score card and the diagnostics.
pub fn cmd_fit(cfg: &RunConfig) -> CliResult<ScoreCard> {
    let data = load_data(cfg)?;
    let out = Layout::new(&cfg.output_dir);
    let z = &data.model_scale;
    let m = z.period_length();

    let wants = |k: ModelKind| cfg.models.contains(&k);
    let (hw, sarima, dlm) = std::thread::scope(|scope| {
        let hw = scope.spawn(|| wants(ModelKind::Hw).then(|| fit_hw(z)).transpose());
        let sarima = scope.spawn(|| wants(ModelKind::Sarima).then(|| fit_sarima(z)).transpose());
        let dlm = wants(ModelKind::Dlm).then(|| fit_dlm(cfg, z)).transpose();
        (
            hw.join().expect("Holt-Winters worker panicked"),
            sarima.join().expect("SARIMA worker panicked"),
            dlm,
        )
    });
    let (hw, sarima, dlm) = (hw?, sarima?, dlm?);

    // Diagnostics on the modelling scale.
    let mut corr = String::from("series,n,lag,acf,pacf\n");
    correlogram_rows(&mut corr, "level", z.values(), cfg.acf_lags)?;
    let diffed = difference(z, 1, 1, m).context("ts-core::difference")?;
    correlogram_rows(&mut corr, "differenced", diffed.values(), cfg.acf_lags)?;
    write_text(&out.file("diagnostics_acf.csv"), &corr)?;
    let mut tests = tests_header();
    test_rows(&mut tests, "phillips_perron", "level", &phillips_perron(z).context("ts-core::phillips_perron")?);
    if diffed.len() >= 20 {
        let pp = phillips_perron(&diffed).context("ts-core::phillips_perron")?;
        test_rows(&mut tests, "phillips_perron", "differenced", &pp);
    }

    let mut fits: Vec<(ModelKind, TimeSeries)> = Vec::new();
    if let Some(hw) = &hw {
        let mut sel = String::from("method,alpha,beta,gamma,sse,selected\n");
        for (i, f) in hw.candidates.iter().enumerate() {
            let p = &f.params;
            let _ = writeln!(
                sel,
                "{},{},{},{},{},{}",
                method_name(p.method),
                p.alpha,
                p.beta,
                p.gamma,
                f.sse,
                i == hw.best
            );
        }
        write_text(&out.file("hw_selection.csv"), &sel)?;
        let best = &hw.candidates[hw.best];
        write_json(&out.file("hw_model.json"), best)?;
        let fitted = from_model_scale(cfg, &best.fitted)?;
        write_text(&out.file("fitted_hw.csv"), &series_csv(&fitted))?;
        fits.push((ModelKind::Hw, fitted));
    }
    if let Some(s) = &sarima {
        write_text(&out.file("sarima_grid.csv"), &s.grid.to_csv_string())?;
        write_json(&out.file("sarima_model.json"), s.grid.best())?;
        let fitted = from_model_scale(cfg, &s.fitted)?;
        write_text(&out.file("fitted_sarima.csv"), &series_csv(&fitted))?;
        let k = s.grid.best().order.n_coefficients();
        let lags = cfg.ljung_box_lags.max(k + 1);
        let lb = ljung_box(&s.residuals, lags, k).context("ts-core::ljung_box")?;
        test_rows(&mut tests, "ljung_box", "sarima_residuals", &lb);
        fits.push((ModelKind::Sarima, fitted));
    }
    if let Some(d) = &dlm {
        write_text(&out.file("gibbs_chain.csv"), &d.chain.to_csv_string())?;
        write_text(&out.file("gibbs_summary.csv"), &gibbs_summary(&d.chain))?;
        write_json(&out.file("dlm_model.json"), &d.artifact)?;
        let fitted = from_model_scale(cfg, &d.fitted)?;
        write_text(&out.file("fitted_dlm.csv"), &series_csv(&fitted))?;
        fits.push((ModelKind::Dlm, fitted));
    }
    write_text(&out.file("diagnostics_tests.csv"), &tests)?;
    write_text(&out.file("observed.csv"), &series_csv(&data.full))?;
    // Score every model on the window where all of them have fitted values.
    let start = fits.iter().map(|(_, f)| f.origin()).max().expect("at least one model");
    let window = data.train.after(start.shift(-1, m)).context("ts-core::window")?;
    let mut rows = Vec::new();
    for (kind, fitted) in &fits {
        let fitted = fitted.after(start.shift(-1, m)).context("ts-core::window")?;
        rows.push(score(&window, &fitted, kind.label()).context("metrics::score")?);
    }
    let card = compare(rows);
    write_text(&out.file("scorecard_fitted.csv"), &card.to_csv_string())?;
    Ok(card)
}

/// Type-7 sample quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn gibbs_summary(chain: &GibbsChain) -> String {
    let names = ["sigma2", "sigma2_mu", "sigma2_beta", "sigma2_gamma"];
    let mut out = String::from("parameter,mean,sd,q025,q500,q975\n");
    let kept = chain.retained();
    for (k, name) in names.iter().enumerate() {
        let mut v: Vec<f64> = kept.iter().map(|d| d.to_array()[k]).collect();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
        v.sort_by(f64::total_cmp);
        let _ = writeln!(
            out,
            "{name},{mean},{sd},{},{},{}",
            quantile(&v, 0.025),
            quantile(&v, 0.5),
            quantile(&v, 0.975)
        );
    }
    out
}

/// Growth of a forecast path whose first step grows from `last_observed`.
fn path_growth(last_observed: f64, path: &[f64]) -> Vec<f64> {
    let mut prev = last_observed;
    path.iter()
        .map(|v| {
            let g = (v - prev) / prev;
            prev = *v;
            g
        })
        .collect()
}

/// Forecast from the saved fit artifacts, score against the held-out
/// data and compare growth rates.
pub fn cmd_forecast(cfg: &RunConfig) -> CliResult<ScoreCard> {
    let data = load_data(cfg)?;
    let out = Layout::new(&cfg.output_dir);
    let z = &data.model_scale;
    let h = cfg.horizon;

    let mut forecasts: Vec<(ModelKind, ForecastResult)> = Vec::new();
    for kind in &cfg.models {
        let f = match kind {
            ModelKind::Hw => {
                let fit: HwFit = read_json(&out.require("hw_model.json", "fit")?)?;
                hw_forecast(&fit, h, cfg.level).context("holt-winters::hw_forecast")?
            }
            ModelKind::Sarima => {
                let model: SarimaModel = read_json(&out.require("sarima_model.json", "fit")?)?;
                sarima::forecast(&model, z, h, cfg.level).context("sarima::forecast")?
            }
            ModelKind::Dlm => {
                let artifact: DlmArtifact = read_json(&out.require("dlm_model.json", "fit")?)?;
                let text = read_text(&out.require("gibbs_chain.csv", "fit")?)?;
                let mut chain = GibbsChain::from_csv_str(&text, artifact.seed).context("dlm::read_chain")?;
                chain.n_iter = artifact.n_iter;
                dlm_forecast(&artifact.template, &chain, z, h, cfg.level, cfg.seed.wrapping_add(1))
                    .context("dlm::forecast")?
            }
        };
        let mut f = forecast_to_original(cfg, f)?;
        f.model_label = kind.label().to_string();
        write_text(&out.file(&format!("forecast_{}.csv", kind.key())), &f.to_csv_string())?;
        forecasts.push((*kind, f));
    }

    let test = data.test.as_ref();
    let mut rows = Vec::new();
    if let Some(test) = test {
        if test.len() < h {
            log::warn!(
                "horizon {h} exceeds the {} held-out observations; scoring the overlap",
                test.len()
            );
        }
        for (kind, f) in &forecasts {
            rows.push(score(test, &f.points, kind.label()).context("metrics::score")?);
        }
    }
    let card = compare(rows);
    write_text(&out.file("scorecard_forecast.csv"), &card.to_csv_string())?;

    let last = *data.train.values().last().expect("training data is non-empty");
    let observed = growth_rate(&data.full).context("metrics::growth_rate")?;
    let mut growth = String::from("quarter,model,model_growth,observed_growth\n");
    for (kind, f) in &forecasts {
        let g = path_growth(last, f.points.values());
        for (i, period) in f.points.periods().enumerate() {
            let obs = observed
                .index_of(period)
                .map(|j| observed.values()[j].to_string())
                .unwrap_or_default();
            let _ = writeln!(growth, "{period},{},{},{obs}", kind.key(), g[i]);
        }
    }
    write_text(&out.file("growth_comparison.csv"), &growth)?;
    Ok(card)
}
