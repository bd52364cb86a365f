mod common;

#[path = "../examples/make_fixture.rs"]
mod make_fixture;

use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::Path;

use common::{float_column, gdpcast, read_csv, run_pipeline, write_config};

const FIXTURE: &str = include_str!("../data/gdp_fixture.csv");
const QUICK: &str = "gibbs_iter = 300\ngibbs_burn = 100\n";

#[test]
fn generator_reproduces_bundled_fixture() {
    assert_eq!(make_fixture::fixture_csv(), FIXTURE);
}

#[test]
fn offline_fetch_copies_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "");
    let out = gdpcast(&["fetch", "--config", config.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("gdp.csv")).unwrap(), FIXTURE);
}

/// Serve one HTTP response with the given body, returning the URL.
fn serve_once(body: &'static str) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        let (mut stream, _) = listener.accept().unwrap();
        let mut buf = [0u8; 4096];
        let _ = stream.read(&mut buf);
        let response = format!(
            "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        );
        let _ = stream.write_all(response.as_bytes());
    });
    format!("http://{addr}/values")
}

fn fetch_from(url: &str) -> (std::process::Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "");
    let out = gdpcast(&[
        "fetch",
        "--config",
        config.to_str().unwrap(),
        "--offline",
        "false",
        "--endpoint",
        url,
    ]);
    (out, dir)
}

#[test]
fn malformed_payload_exits_with_network_code() {
    let (out, _dir) = fetch_from(&serve_once("{\"unexpected\": [1, 2"));
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("offline"));
}

#[test]
fn unreachable_endpoint_exits_with_network_code() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let (out, _dir) = fetch_from(&format!("http://127.0.0.1:{port}/"));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn json_payload_is_validated_and_written() {
    let body = r#"[{"D3C":"Trimestre (Codigo)","V":"Valor"},
        {"D3C":"199601","V":"100.5"},{"D3C":"199602","V":"101.25"},{"D3C":"199603","V":"99"}]"#;
    let (out, dir) = fetch_from(&serve_once(body));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("gdp.csv")).unwrap();
    assert_eq!(text, "date,value\n1996-Q1,100.5\n1996-Q2,101.25\n1996-Q3,99\n");

    let gap = r#"[{"D3C":"199601","V":"1"},{"D3C":"199603","V":"2"}]"#;
    let (out, _dir) = fetch_from(&serve_once(gap));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.conf");
    assert_eq!(gdpcast(&["fit", "--config", missing.to_str().unwrap()]).status.code(), Some(2));

    let config = write_config(dir.path(), "");
    let config = config.to_str().unwrap();
    assert_eq!(gdpcast(&["fit", "--config", config, "--colour", "red"]).status.code(), Some(2));
    assert_eq!(gdpcast(&["fit", "--config", config, "--horizon", "0"]).status.code(), Some(2));
    // No input file yet.
    assert_eq!(gdpcast(&["fit", "--config", config]).status.code(), Some(2));

    assert!(gdpcast(&["fetch", "--config", config]).status.success());
    // Artifacts of earlier stages are missing.
    for cmd in ["forecast", "plot", "report"] {
        assert_eq!(gdpcast(&[cmd, "--config", config]).status.code(), Some(2), "{cmd}");
    }
    assert_eq!(
        gdpcast(&["fit", "--config", config, "--train-end=2030-Q1"]).status.code(),
        Some(2)
    );
}

#[test]
fn overrides_reach_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_pipeline(dir.path(), &format!("{QUICK}models = hw\n"));
    assert_eq!(read_csv(&out.join("forecast_hw.csv")).1.len(), 12);

    let config = dir.path().join("run.conf");
    let config = config.to_str().unwrap();
    let status = gdpcast(&["forecast", "--config", config, "--horizon=4", "--models", "hw"]).status;
    assert!(status.success());
    assert_eq!(read_csv(&out.join("forecast_hw.csv")).1.len(), 4);
    let meta = std::fs::read_to_string(out.join("run_meta.txt")).unwrap();
    assert!(meta.contains("horizon = 4") && meta.contains("started_unix"));
}

struct PlotArea {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl PlotArea {
    fn from_node(node: roxmltree::Node) -> Self {
        let a = |k: &str| node.attribute(k).unwrap().parse::<f64>().unwrap();
        PlotArea {
            left: a("data-left"),
            top: a("data-top"),
            width: a("data-width"),
            height: a("data-height"),
            x: (a("data-x-min"), a("data-x-max")),
            y: (a("data-y-min"), a("data-y-max")),
        }
    }

    fn data(&self, sx: f64, sy: f64) -> (f64, f64) {
        (
            self.x.0 + (sx - self.left) / self.width * (self.x.1 - self.x.0),
            self.y.1 - (sy - self.top) / self.height * (self.y.1 - self.y.0),
        )
    }
}

fn points(node: roxmltree::Node) -> Vec<(f64, f64)> {
    node.attribute("points")
        .unwrap()
        .split_whitespace()
        .map(|p| {
            let (x, y) = p.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

fn quarter_x(date: &str) -> f64 {
    let (y, q) = date.split_once("-Q").unwrap();
    y.parse::<f64>().unwrap() + (q.parse::<f64>().unwrap() - 1.0) / 4.0
}

fn check_fit_chart(out: &Path, key: &str, horizon: usize) {
    let text = std::fs::read_to_string(out.join(format!("fit_{key}.svg"))).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let area = doc.descendants().find(|n| n.attribute("class") == Some("plot-area")).unwrap();
    let frame = PlotArea::from_node(area);
    let band = area.descendants().find(|n| n.attribute("class") == Some("band")).unwrap();
    assert_eq!(points(band).len(), 2 * horizon);

    let forecast = area.descendants().find(|n| n.attribute("class") == Some("forecast")).unwrap();
    let csv = out.join(format!("forecast_{key}.csv"));
    let dates = common::column(&csv, "date");
    let values = float_column(&csv, "point");
    let plotted = points(forecast);
    assert_eq!(plotted.len(), horizon);
    for ((sx, sy), (d, v)) in plotted.into_iter().zip(dates.iter().zip(&values)) {
        let (x, y) = frame.data(sx, sy);
        assert!((x - quarter_x(d)).abs() < 1e-6, "{key} {d}");
        assert!((y - v).abs() < 1e-6 * v.abs().max(1.0), "{key} {d}: {y} vs {v}");
    }
}

#[test]
fn charts_are_well_formed_and_invertible() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_pipeline(dir.path(), QUICK);
    for name in ["fit_hw", "fit_sarima", "fit_dlm", "acf", "pacf", "gibbs_trace", "growth"] {
        let text = std::fs::read_to_string(out.join(format!("{name}.svg"))).unwrap();
        assert!(!text.is_empty());
        roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{name}.svg: {e}"));
    }
    for key in ["hw", "sarima", "dlm"] {
        check_fit_chart(&out, key, 12);
        assert!(float_column(&out.join(format!("forecast_{key}.csv")), "point").iter().all(|v| *v > 0.0));
    }
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("In-sample accuracy") && report.contains("SARIMA grid"));
}
