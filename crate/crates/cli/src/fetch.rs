use std::fmt::Write as _;

use gdpcast_core::{Period, TimeSeries};
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::files::write_text;

/// The bundled GDP-like fixture, 1996-Q1 to 2019-Q4.
pub const FIXTURE: &str = include_str!("../data/gdp_fixture.csv");

/// Download (or, offline, copy the fixture) and write the canonical CSV to
/// the configured input path.
pub fn cmd_fetch(cfg: &RunConfig) -> CliResult<TimeSeries> {
    let series = if cfg.offline {
        TimeSeries::from_csv_str(FIXTURE).map_err(|e| CliError::input("fetch::fixture", e.to_string()))?
    } else {
        let url = cfg
            .endpoint
            .as_deref()
            .ok_or_else(|| CliError::input("fetch", "no endpoint configured (set `endpoint` or `offline true`)"))?;
        let body = download(url)?;
        parse_payload(&body, &cfg.period_field, &cfg.value_field)?
    };
    let text = if cfg.offline { FIXTURE.to_string() } else { series.to_csv_string() };
    write_text(&cfg.input, &text)?;
    Ok(series)
}

fn download(url: &str) -> CliResult<String> {
    let mut response = ureq::get(url)
        .call()
        .map_err(|e| CliError::network("fetch::download", format!("{url}: {e}")))?;
    response
        .body_mut()
        .read_to_string()
        .map_err(|e| CliError::network("fetch::download", format!("{url}: {e}")))
}

/// Accepts the canonical `date,value` CSV or a JSON array of records whose
/// `period_field` holds a quarter code (`199601` or `1996-Q1`) and whose
/// `value_field` holds the value. Records whose value is not numeric
/// (such as a header record) are skipped.
pub fn parse_payload(body: &str, period_field: &str, value_field: &str) -> CliResult<TimeSeries> {
    let schema = |msg: String| CliError::network("fetch::validate", msg);
    let trimmed = body.trim_start();
    if !(trimmed.starts_with('[') || trimmed.starts_with('{')) {
        return TimeSeries::from_csv_str(body).map_err(|e| schema(format!("CSV payload rejected: {e}")));
    }
    let json: Value = serde_json::from_str(body).map_err(|e| schema(format!("malformed JSON: {e}")))?;
    let records = json
        .as_array()
        .ok_or_else(|| schema("JSON payload is not an array of records".into()))?;
    let mut csv = String::from("date,value\n");
    let mut rows = 0;
    for rec in records {
        let (Some(p), Some(v)) = (rec.get(period_field), rec.get(value_field)) else {
            return Err(schema(format!("record lacks {period_field:?} or {value_field:?}")));
        };
        let value = match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => s.trim().parse::<f64>().ok(),
            _ => None,
        };
        let Some(value) = value else { continue };
        let code = match p {
            Value::String(s) => s.trim().to_string(),
            Value::Number(n) => n.to_string(),
            _ => return Err(schema(format!("unreadable period {p}"))),
        };
        let period = parse_quarter_code(&code).ok_or_else(|| schema(format!("unreadable period {code:?}")))?;
        let _ = writeln!(csv, "{period},{value}");
        rows += 1;
    }
    if rows == 0 {
        return Err(schema("payload has no numeric observations".into()));
    }
    TimeSeries::from_csv_str(&csv).map_err(|e| schema(format!("payload rejected: {e}")))
}

fn parse_quarter_code(code: &str) -> Option<Period> {
    if let Ok(p) = code.parse::<Period>() {
        return Some(p);
    }
    if code.len() == 6 && code.chars().all(|c| c.is_ascii_digit()) {
        let year: i32 = code[..4].parse().ok()?;
        let q: u32 = code[4..].parse().ok()?;
        return (1..=4).contains(&q).then(|| Period::new(year, q));
    }
    None
}
