use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gdpcast_core::Period;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    None,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModelKind {
    Hw,
    Sarima,
    Dlm,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Hw, ModelKind::Sarima, ModelKind::Dlm];

    pub fn key(self) -> &'static str {
        match self {
            ModelKind::Hw => "hw",
            ModelKind::Sarima => "sarima",
            ModelKind::Dlm => "dlm",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Hw => "Holt-Winters",
            ModelKind::Sarima => "SARIMA",
            ModelKind::Dlm => "DLM",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub transform: Transform,
    pub train_end: Period,
    pub horizon: usize,
    pub level: f64,
    pub models: Vec<ModelKind>,
    pub seed: u64,
    pub gibbs_iter: usize,
    pub gibbs_burn: usize,
    pub output_dir: PathBuf,
    /// Lags for the correlograms and the Ljung-Box test.
    pub acf_lags: usize,
    pub ljung_box_lags: usize,
    /// `fetch` settings.
    pub endpoint: Option<String>,
    pub offline: bool,
    pub period_field: String,
    pub value_field: String,
}

const KEYS: [&str; 16] = [
    "input",
    "transform",
    "train_end",
    "horizon",
    "level",
    "models",
    "seed",
    "gibbs_iter",
    "gibbs_burn",
    "output_dir",
    "acf_lags",
    "ljung_box_lags",
    "endpoint",
    "offline",
    "period_field",
    "value_field",
];

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: PathBuf::from("gdp.csv"),
            transform: Transform::Log,
            train_end: Period::new(2016, 4),
            horizon: 12,
            level: 0.95,
            models: ModelKind::ALL.to_vec(),
            seed: 2021,
            gibbs_iter: 5000,
            gibbs_burn: 1000,
            output_dir: PathBuf::from("out"),
            acf_lags: 20,
            ljung_box_lags: 8,
            endpoint: None,
            offline: false,
            period_field: "D3C".into(),
            value_field: "V".into(),
        }
    }
}

fn bad(key: &str, value: &str, why: &str) -> CliError {
    CliError::input("config", format!("{key} = {value:?}: {why}"))
}

fn parse<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value.parse().map_err(|_| bad(key, value, "cannot parse"))
}

fn parse_bool(key: &str, value: &str) -> CliResult<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

/// Canonical spelling of a key: `train-end` and `train_end` are the same.
fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parse flat `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::input("config", format!("line {}: expected key = value", i + 1)))?;
        out.push((normalize(k), v.trim().to_string()));
    }
    Ok(out)
}

/// Turn `--key value` pairs into overrides.
pub fn parse_overrides(args: &[String]) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| CliError::input("arguments", format!("expected --key, got {flag:?}")))?;
        if let Some((k, v)) = key.split_once('=') {
            out.push((normalize(k), v.to_string()));
            continue;
        }
        let value = it
            .next()
            .ok_or_else(|| CliError::input("arguments", format!("--{key} needs a value")))?;
        out.push((normalize(key), value.clone()));
    }
    Ok(out)
}

impl RunConfig {
    /// Build from a config file plus overrides. Relative paths in the file
    /// are resolved against its directory; relative paths given as
    /// overrides are taken as they are.
    pub fn load(path: &Path, overrides: &[(String, String)]) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut cfg = RunConfig::default();
        for (k, v) in parse_pairs(&text)? {
            cfg.set(&k, &v, Some(base))?;
        }
        for (k, v) in overrides {
            cfg.set(k, v, None)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str, base: Option<&Path>) -> CliResult<()> {
        let path = |v: &str| match base {
            Some(b) if Path::new(v).is_relative() => b.join(v),
            _ => PathBuf::from(v),
        };
        match key {
            "input" => self.input = path(value),
            "output_dir" => self.output_dir = path(value),
            "transform" => {
                self.transform = match value {
                    "log" => Transform::Log,
                    "none" => Transform::None,
                    _ => return Err(bad(key, value, "expected none or log")),
                }
            }
            "train_end" => {
                self.train_end = value.parse().map_err(|_| bad(key, value, "expected YYYY-Qn"))?
            }
            "horizon" => self.horizon = parse(key, value)?,
            "level" => self.level = parse(key, value)?,
            "models" => {
                let mut models = Vec::new();
                for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let m = ModelKind::ALL
                        .into_iter()
                        .find(|m| m.key() == name)
                        .ok_or_else(|| bad(key, value, "models are hw, sarima, dlm"))?;
                    if !models.contains(&m) {
                        models.push(m);
                    }
                }
                models.sort();
                self.models = models;
            }
            "seed" => self.seed = parse(key, value)?,
            "gibbs_iter" => self.gibbs_iter = parse(key, value)?,
            "gibbs_burn" => self.gibbs_burn = parse(key, value)?,
            "acf_lags" => self.acf_lags = parse(key, value)?,
            "ljung_box_lags" => self.ljung_box_lags = parse(key, value)?,
            "endpoint" => self.endpoint = (!value.is_empty()).then(|| value.to_string()),
            "offline" => self.offline = parse_bool(key, value)?,
            "period_field" => self.period_field = value.to_string(),
            "value_field" => self.value_field = value.to_string(),
            _ => {
                return Err(CliError::input(
                    "config",
                    format!(
                        "unknown key {key:?}; known keys: {}",
                        KEYS.join(", ")
                    ),
                ))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.horizon < 1 {
            return Err(CliError::input("config", "horizon must be at least 1"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(CliError::input("config", format!("level {} outside (0, 1)", self.level)));
        }
        if self.models.is_empty() {
            return Err(CliError::input("config", "no models selected"));
        }
        if self.gibbs_iter <= self.gibbs_burn {
            return Err(CliError::input("config", "gibbs_iter must exceed gibbs_burn"));
        }
        if self.acf_lags < 1 || self.ljung_box_lags < 1 {
            return Err(CliError::input("config", "lag counts must be at least 1"));
        }
        Ok(())
    }

    /// Effective settings as `key = value` lines, for the run metadata.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input = {}", self.input.display());
        let transform = match self.transform {
            Transform::Log => "log",
            Transform::None => "none",
        };
        let _ = writeln!(out, "transform = {transform}");
        let _ = writeln!(out, "train_end = {}", self.train_end);
        let _ = writeln!(out, "horizon = {}", self.horizon);
        let _ = writeln!(out, "level = {}", self.level);
        let models: Vec<&str> = self.models.iter().map(|m| m.key()).collect();
        let _ = writeln!(out, "models = {}", models.join(","));
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "gibbs_iter = {}", self.gibbs_iter);
        let _ = writeln!(out, "gibbs_burn = {}", self.gibbs_burn);
        let _ = writeln!(out, "acf_lags = {}", self.acf_lags);
        let _ = writeln!(out, "ljung_box_lags = {}", self.ljung_box_lags);
        let _ = writeln!(out, "output_dir = {}", self.output_dir.display());
        out
    }
}
