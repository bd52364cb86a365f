use std::fmt::Write as _;
use std::path::Path;

use gdpcast_core::metrics::{compare, ScoreRow};

use crate::config::{ModelKind, RunConfig};
use crate::error::{CliError, CliResult};
use crate::files::{write_text, Layout};
use crate::table::Table;

fn bad(path: &Path, message: String) -> CliError {
    CliError::input(path.display().to_string(), message)
}

/// Rebuild a score card from its CSV so the best-value flags can be shown.
fn score_table(path: &Path) -> CliResult<String> {
    let t = Table::read(path)?;
    let f = |c: &str| t.floats(c).map_err(|e| bad(path, e));
    let labels = t.strings("Model").map_err(|e| bad(path, e))?;
    let (rmse, mae, mape, u1, u2, n) = (f("RMSE")?, f("MAE")?, f("MAPE")?, f("U1")?, f("U2")?, f("N")?);
    if labels.is_empty() {
        return Ok("(no rows)\n".into());
    }
    let rows = (0..labels.len())
        .map(|i| ScoreRow {
            label: labels[i].clone(),
            rmse: rmse[i],
            mae: mae[i],
            mape: mape[i],
            u1: u1[i],
            u2: u2[i],
            n: n[i] as usize,
        })
        .collect();
    let card = compare(rows);
    let mut out = card.to_table();
    let _ = writeln!(out, "(* marks the smallest value of each metric; N = {} observations)", n[0]);
    Ok(out)
}

fn section(out: &mut String, title: &str, body: &str) {
    let _ = writeln!(out, "{title}\n{}\n{body}", "-".repeat(title.len()));
}

/// Assemble report.txt from the CSV artifacts of fit and forecast.
pub fn cmd_report(cfg: &RunConfig) -> CliResult<String> {
    let out = Layout::new(&cfg.output_dir);
    let mut text = String::from("GDP forecasting model comparison\n================================\n\n");
    section(&mut text, "Configuration", &format!("{}\n", cfg.describe()));

    let tests = Table::read(&out.require("diagnostics_tests.csv", "fit")?)?;
    section(&mut text, "Stationarity and residual tests", &format!("{}\n", tests.to_text()));

    for kind in &cfg.models {
        match kind {
            ModelKind::Hw => {
                let t = Table::read(&out.require("hw_selection.csv", "fit")?)?;
                section(&mut text, "Holt-Winters selection", &format!("{}\n", t.to_text()));
            }
            ModelKind::Sarima => {
                let t = Table::read(&out.require("sarima_grid.csv", "fit")?)?;
                section(&mut text, "SARIMA grid, ranked by AIC", &format!("{}\n", t.to_text()));
            }
            ModelKind::Dlm => {
                let t = Table::read(&out.require("gibbs_summary.csv", "fit")?)?;
                let body = format!(
                    "{}\n{} iterations, {} burn-in, seed {}\n",
                    t.to_text(),
                    cfg.gibbs_iter,
                    cfg.gibbs_burn,
                    cfg.seed
                );
                section(&mut text, "DLM variance posterior", &body);
            }
        }
    }

    let fitted = score_table(&out.require("scorecard_fitted.csv", "fit")?)?;
    section(&mut text, "In-sample accuracy", &format!("{fitted}\n"));
    let forecast = score_table(&out.require("scorecard_forecast.csv", "forecast")?)?;
    section(&mut text, "Out-of-sample accuracy", &format!("{forecast}\n"));
    let growth = Table::read(&out.require("growth_comparison.csv", "forecast")?)?;
    section(&mut text, "Forecast growth rates", &growth.to_text());

    write_text(&out.file("report.txt"), &text)?;
    Ok(text)
}
