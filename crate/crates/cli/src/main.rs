//! `gdpcast`: fetch quarterly GDP, fit Holt-Winters, SARIMA and DLM models,
//! forecast a held-out window and compare them.

mod charts;
mod config;
mod error;
mod fetch;
mod files;
mod pipeline;
mod plot;
mod report;
mod table;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use crate::config::{parse_overrides, RunConfig};
use crate::error::CliResult;
use crate::files::Layout;

#[derive(Parser)]
#[command(name = "gdpcast", version, about = "Quarterly GDP model comparison pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides of configuration keys, as `--key value` or `--key=value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Download the GDP series (or copy the bundled fixture when offline).
    Fetch(Common),
    /// Fit every configured model on the training window.
    Fit(Common),
    /// Forecast the held-out window from the saved fits.
    Forecast(Common),
    /// Render SVG charts from the fit and forecast artifacts.
    Plot(Common),
    /// Write report.txt from the CSV artifacts.
    Report(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fetch(_) => "fetch",
            Command::Fit(_) => "fit",
            Command::Forecast(_) => "forecast",
            Command::Plot(_) => "plot",
            Command::Report(_) => "report",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Fetch(c) | Command::Fit(c) | Command::Forecast(c) | Command::Plot(c) | Command::Report(c) => c,
        }
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

fn run(command: &Command) -> CliResult<()> {
    let common = command.common();
    let overrides = parse_overrides(&common.overrides)?;
    let cfg = RunConfig::load(&common.config, &overrides)?;
    let started = unix_now();
    match command {
        Command::Fetch(_) => {
            let s = fetch::cmd_fetch(&cfg)?;
            println!("wrote {} observations ({}..{}) to {}", s.len(), s.origin(), s.end(), cfg.input.display());
        }
        Command::Fit(_) => {
            let card = pipeline::cmd_fit(&cfg)?;
            print!("{}", card.to_table());
        }
        Command::Forecast(_) => {
            let card = pipeline::cmd_forecast(&cfg)?;
            print!("{}", card.to_table());
        }
        Command::Plot(_) => {
            for name in charts::cmd_plot(&cfg)? {
                println!("wrote {name}");
            }
        }
        Command::Report(_) => print!("{}", report::cmd_report(&cfg)?),
    }
    if !matches!(command, Command::Fetch(_)) {
        let mut meta = String::new();
        let _ = writeln!(meta, "[{}]", command.name());
        let _ = writeln!(meta, "started_unix = {started:.3}");
        let _ = writeln!(meta, "finished_unix = {:.3}", unix_now());
        meta.push_str(&cfg.describe());
        meta.push('\n');
        files::append_text(&Layout::new(&cfg.output_dir).file("run_meta.txt"), &meta)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
