#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const COMMANDS: [&str; 5] = ["fetch", "fit", "forecast", "plot", "report"];

pub fn gdpcast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdpcast"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("failed to launch gdpcast")
}

/// Offline config under `dir` reading `dir/gdp.csv` and writing to `dir/out`.
pub fn write_config(dir: &Path, extra: &str) -> PathBuf {
    let path = dir.join("run.conf");
    let text = format!("input = gdp.csv\noutput_dir = out\noffline = true\n{extra}");
    std::fs::write(&path, text).unwrap();
    path
}

/// Run every subcommand in order and return the output directory.
pub fn run_pipeline(dir: &Path, extra: &str) -> PathBuf {
    let config = write_config(dir, extra);
    let config = config.to_str().unwrap();
    for cmd in COMMANDS {
        let out = gdpcast(&[cmd, "--config", config]);
        assert!(
            out.status.success(),
            "`gdpcast {cmd}` failed with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
    }
    dir.join("out")
}

/// Header and rows of a CSV written by the pipeline.
pub fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

pub fn column(path: &Path, name: &str) -> Vec<String> {
    let (header, rows) = read_csv(path);
    let c = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.into_iter().map(|r| r[c].clone()).collect()
}

pub fn float_column(path: &Path, name: &str) -> Vec<f64> {
    column(path, name).iter().map(|v| v.parse().unwrap()).collect()
}
