use std::collections::BTreeMap;
use std::path::Path;

use gdpcast_core::Period;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::files::{read_series, write_text, Layout};
use crate::plot::{period_x, render, Layer, Panel, PALETTE};
use crate::table::Table;

fn table(path: &Path) -> CliResult<Table> {
    Table::read(path)
}

fn bad(path: &Path, message: String) -> CliError {
    CliError::input(path.display().to_string(), message)
}

fn xs(path: &Path, t: &Table, column: &str, m: usize) -> CliResult<Vec<f64>> {
    t.strings(column)
        .map_err(|e| bad(path, e))?
        .iter()
        .map(|d| {
            d.parse::<Period>()
                .map(|p| period_x(p, m))
                .map_err(|e| bad(path, format!("bad period {d:?}: {e}")))
        })
        .collect()
}

fn floats(path: &Path, t: &Table, column: &str) -> CliResult<Vec<f64>> {
    t.floats(column).map_err(|e| bad(path, e))
}

fn fit_chart(cfg: &RunConfig, out: &Layout, kind: crate::config::ModelKind) -> CliResult<String> {
    let observed = read_series(&out.require("observed.csv", "fit")?)?;
    let m = observed.period_length();
    let fitted = read_series(&out.require(&format!("fitted_{}.csv", kind.key()), "fit")?)?;
    let fc_path = out.require(&format!("forecast_{}.csv", kind.key()), "forecast")?;
    let fc = table(&fc_path)?;
    let fx = xs(&fc_path, &fc, "date", m)?;
    let line = |s: &gdpcast_core::TimeSeries| -> Vec<(f64, f64)> {
        s.periods().map(|p| period_x(p, m)).zip(s.values().iter().copied()).collect()
    };
    let level = (cfg.level * 100.0).round();
    let panel = Panel {
        title: format!("{}: fitted and forecast", kind.label()),
        layers: vec![
            Layer::Band {
                class: "band".into(),
                colour: PALETTE[1],
                x: fx.clone(),
                lower: floats(&fc_path, &fc, "lower")?,
                upper: floats(&fc_path, &fc, "upper")?,
            },
            Layer::Line {
                class: "observed".into(),
                colour: PALETTE[0],
                points: line(&observed),
                dashed: false,
            },
            Layer::Line {
                class: "fitted".into(),
                colour: PALETTE[2],
                points: line(&fitted),
                dashed: false,
            },
            Layer::Line {
                class: "forecast".into(),
                colour: PALETTE[1],
                points: fx.into_iter().zip(floats(&fc_path, &fc, "point")?).collect(),
                dashed: true,
            },
        ],
        legend: vec![
            (PALETTE[0], "observed".into()),
            (PALETTE[2], "fitted".into()),
            (PALETTE[1], format!("forecast ({level}% band)")),
        ],
        zero_line: false,
    };
    Ok(render(&format!("{} fit", kind.label()), &[panel]))
}

/// ACF or PACF stems for each series in the diagnostics file, with
/// approximate 95% white-noise limits.
fn correlogram_chart(out: &Layout, column: &str, name: &str) -> CliResult<String> {
    let path = out.require("diagnostics_acf.csv", "fit")?;
    let t = table(&path)?;
    let series = t.strings("series").map_err(|e| bad(&path, e))?;
    let n = floats(&path, &t, "n")?;
    let lag = floats(&path, &t, "lag")?;
    let value = floats(&path, &t, column)?;
    let mut order: Vec<String> = Vec::new();
    for s in &series {
        if !order.contains(s) {
            order.push(s.clone());
        }
    }
    let panels = order
        .iter()
        .map(|s| {
            let idx: Vec<usize> = (0..series.len()).filter(|&i| &series[i] == s).collect();
            let limit = 1.96 / n[idx[0]].sqrt();
            Panel {
                title: format!("{name}: {s}"),
                layers: vec![
                    Layer::Stems {
                        class: column.into(),
                        colour: PALETTE[0],
                        points: idx.iter().map(|&i| (lag[i], value[i])).collect(),
                    },
                    Layer::HLine {
                        class: "limit".into(),
                        y: limit,
                    },
                    Layer::HLine {
                        class: "limit".into(),
                        y: -limit,
                    },
                ],
                legend: Vec::new(),
                zero_line: true,
            }
        })
        .collect::<Vec<_>>();
    Ok(render(name, &panels))
}

fn gibbs_chart(out: &Layout) -> CliResult<String> {
    let path = out.require("gibbs_chain.csv", "fit")?;
    let t = table(&path)?;
    let iter = floats(&path, &t, "iter")?;
    let mut panels = Vec::new();
    for name in ["sigma2", "sigma2_mu", "sigma2_beta", "sigma2_gamma"] {
        let v = floats(&path, &t, name)?;
        let mut total = 0.0;
        let running: Vec<(f64, f64)> = v
            .iter()
            .enumerate()
            .map(|(i, x)| {
                total += x;
                (iter[i], total / (i + 1) as f64)
            })
            .collect();
        panels.push(Panel {
            title: name.to_string(),
            layers: vec![
                Layer::Line {
                    class: "trace".into(),
                    colour: PALETTE[0],
                    points: iter.iter().copied().zip(v.iter().copied()).collect(),
                    dashed: false,
                },
                Layer::Line {
                    class: "ergodic-mean".into(),
                    colour: PALETTE[1],
                    points: running,
                    dashed: false,
                },
            ],
            legend: vec![(PALETTE[0], "draw".into()), (PALETTE[1], "running mean".into())],
            zero_line: false,
        });
    }
    Ok(render("Gibbs sampler traces", &panels))
}

fn growth_chart(out: &Layout, m: usize) -> CliResult<String> {
    let path = out.require("growth_comparison.csv", "forecast")?;
    let t = table(&path)?;
    let x = xs(&path, &t, "quarter", m)?;
    let model = t.strings("model").map_err(|e| bad(&path, e))?;
    let g = floats(&path, &t, "model_growth")?;
    let obs = floats(&path, &t, "observed_growth")?;
    let mut by_model: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    let mut observed: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for i in 0..t.rows.len() {
        by_model.entry(model[i].as_str()).or_default().push((x[i], g[i]));
        if obs[i].is_finite() {
            observed.insert((x[i] * m as f64).round() as i64, (x[i], obs[i]));
        }
    }
    let mut layers = Vec::new();
    let mut legend = Vec::new();
    if !observed.is_empty() {
        layers.push(Layer::Line {
            class: "observed".into(),
            colour: PALETTE[0],
            points: observed.into_values().collect(),
            dashed: false,
        });
        legend.push((PALETTE[0], "observed".to_string()));
    }
    for (i, (name, pts)) in by_model.into_iter().enumerate() {
        let colour = PALETTE[1 + i % (PALETTE.len() - 1)];
        layers.push(Layer::Line {
            class: format!("growth-{name}"),
            colour,
            points: pts,
            dashed: true,
        });
        legend.push((colour, name.to_string()));
    }
    let panel = Panel {
        title: "Quarter-on-quarter growth".into(),
        layers,
        legend,
        zero_line: true,
    };
    Ok(render("Growth comparison", &[panel]))
}

/// Render every chart from the fit and forecast artifacts.
pub fn cmd_plot(cfg: &RunConfig) -> CliResult<Vec<String>> {
    let out = Layout::new(&cfg.output_dir);
    let mut written = Vec::new();
    let mut emit = |name: String, svg: String| -> CliResult<()> {
        write_text(&out.file(&name), &svg)?;
        written.push(name);
        Ok(())
    };
    for kind in &cfg.models {
        emit(format!("fit_{}.svg", kind.key()), fit_chart(cfg, &out, *kind)?)?;
    }
    emit("acf.svg".into(), correlogram_chart(&out, "acf", "ACF")?)?;
    emit("pacf.svg".into(), correlogram_chart(&out, "pacf", "PACF")?)?;
    if cfg.models.contains(&crate::config::ModelKind::Dlm) {
        emit("gibbs_trace.svg".into(), gibbs_chart(&out)?)?;
    }
    let m = read_series(&out.require("observed.csv", "fit")?)?.period_length();
    emit("growth.svg".into(), growth_chart(&out, m)?)?;
    Ok(written)
}
