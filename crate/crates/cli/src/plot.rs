//! Static SVG charts.
//!
//! Every chart carries its data-to-screen mapping on the plot group as
//! `data-*` attributes so coordinates can be mapped back to values.

use std::fmt::Write as _;

use gdpcast_core::Period;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 450.0;
const MARGIN: [f64; 4] = [40.0, 30.0, 50.0, 70.0]; // top, right, bottom, left

pub const PALETTE: [&str; 4] = ["#1f4e9c", "#c0392b", "#2e7d32", "#8e44ad"];

/// Decimal year of a quarter-like period: `2016-Q1` maps to 2016.0.
pub fn period_x(p: Period, m: usize) -> f64 {
    p.year as f64 + (p.period as f64 - 1.0) / m as f64
}

/// Linear map from a data window onto a screen rectangle.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64), origin: (f64, f64), size: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| {
            if (hi - lo).abs() < 1e-12 {
                let d = lo.abs().max(1.0) * 0.05;
                (lo - d, hi + d)
            } else {
                let d = (hi - lo) * 0.05;
                (lo - d, hi + d)
            }
        };
        let (x_min, x_max) = if (x.1 - x.0).abs() < 1e-12 { pad(x) } else { x };
        let (y_min, y_max) = pad(y);
        Frame {
            left: origin.0,
            top: origin.1,
            width: size.0,
            height: size.1,
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn sx(&self, x: f64) -> f64 {
        self.left + (x - self.x_min) / (self.x_max - self.x_min) * self.width
    }

    pub fn sy(&self, y: f64) -> f64 {
        self.top + (self.y_max - y) / (self.y_max - self.y_min) * self.height
    }

    fn attrs(&self) -> String {
        format!(
            "data-left=\"{}\" data-top=\"{}\" data-width=\"{}\" data-height=\"{}\" \
             data-x-min=\"{}\" data-x-max=\"{}\" data-y-min=\"{}\" data-y-max=\"{}\"",
            self.left, self.top, self.width, self.height, self.x_min, self.x_max, self.y_min, self.y_max
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn points_attr(frame: &Frame, pts: &[(f64, f64)]) -> String {
    let mut out = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{},{}", frame.sx(*x), frame.sy(*y));
    }
    out
}

fn nice_ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![lo];
    }
    let raw = span / count as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|f| f * mag)
        .find(|s| span / s <= count as f64)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(t);
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1e4 || (v != 0.0 && v.abs() < 1e-3) {
        format!("{v:.3e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// One drawable layer.
pub enum Layer {
    Line {
        class: String,
        colour: &'static str,
        points: Vec<(f64, f64)>,
        dashed: bool,
    },
    /// Closed ribbon: upper edge left to right, then lower edge back.
    Band {
        class: String,
        colour: &'static str,
        x: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Stems {
        class: String,
        colour: &'static str,
        points: Vec<(f64, f64)>,
    },
    HLine {
        class: String,
        y: f64,
    },
}

impl Layer {
    fn extent(&self) -> Vec<(f64, f64)> {
        match self {
            Layer::Line { points, .. } | Layer::Stems { points, .. } => points.clone(),
            Layer::Band { x, lower, upper, .. } => x
                .iter()
                .zip(lower)
                .chain(x.iter().zip(upper))
                .map(|(a, b)| (*a, *b))
                .collect(),
            Layer::HLine { .. } => Vec::new(),
        }
    }
}

pub struct Panel {
    pub title: String,
    pub layers: Vec<Layer>,
    pub legend: Vec<(&'static str, String)>,
    /// Always include zero on the y axis.
    pub zero_line: bool,
}

fn render_panel(out: &mut String, panel: &Panel, origin: (f64, f64), size: (f64, f64)) {
    let pts: Vec<(f64, f64)> = panel
        .layers
        .iter()
        .flat_map(|l| l.extent())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let mut x = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y = (f64::INFINITY, f64::NEG_INFINITY);
    for (a, b) in &pts {
        x = (x.0.min(*a), x.1.max(*a));
        y = (y.0.min(*b), y.1.max(*b));
    }
    if pts.is_empty() {
        x = (0.0, 1.0);
        y = (0.0, 1.0);
    }
    for layer in &panel.layers {
        if let Layer::HLine { y: h, .. } = layer {
            y = (y.0.min(*h), y.1.max(*h));
        }
    }
    if panel.zero_line {
        y = (y.0.min(0.0), y.1.max(0.0));
    }
    let frame = Frame::new(x, y, origin, size);
    let _ = writeln!(out, "<g class=\"plot-area\" {}>", frame.attrs());
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>",
        frame.left, frame.top, frame.width, frame.height
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        frame.left + frame.width / 2.0,
        frame.top - 10.0,
        escape(&panel.title)
    );
    for t in nice_ticks(frame.y_min, frame.y_max, 5) {
        let sy = frame.sy(t);
        let _ = writeln!(
            out,
            "<line class=\"grid\" x1=\"{}\" y1=\"{sy}\" x2=\"{}\" y2=\"{sy}\" stroke=\"#eee\"/>\
             <text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>",
            frame.left,
            frame.left + frame.width,
            frame.left - 4.0,
            sy + 3.0,
            fmt_tick(t)
        );
    }
    for t in nice_ticks(frame.x_min, frame.x_max, 8) {
        let sx = frame.sx(t);
        let _ = writeln!(
            out,
            "<text x=\"{sx}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
            frame.top + frame.height + 14.0,
            fmt_tick(t)
        );
    }
    for layer in &panel.layers {
        match layer {
            Layer::Band {
                class,
                colour,
                x,
                lower,
                upper,
            } => {
                let mut ring: Vec<(f64, f64)> = x.iter().copied().zip(upper.iter().copied()).collect();
                ring.extend(x.iter().copied().zip(lower.iter().copied()).rev());
                let _ = writeln!(
                    out,
                    "<polygon class=\"{class}\" points=\"{}\" fill=\"{colour}\" fill-opacity=\"0.2\" stroke=\"none\"/>",
                    points_attr(&frame, &ring)
                );
            }
            Layer::Line {
                class,
                colour,
                points,
                dashed,
            } => {
                let dash = if *dashed { " stroke-dasharray=\"5,3\"" } else { "" };
                let _ = writeln!(
                    out,
                    "<polyline class=\"{class}\" points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\"{dash}/>",
                    points_attr(&frame, points)
                );
            }
            Layer::Stems { class, colour, points } => {
                let _ = writeln!(out, "<g class=\"{class}\" stroke=\"{colour}\">");
                for (x, y) in points {
                    let _ = writeln!(
                        out,
                        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/>",
                        frame.sx(*x),
                        frame.sy(0.0),
                        frame.sy(*y)
                    );
                }
                let _ = writeln!(out, "</g>");
            }
            Layer::HLine { class, y } => {
                let sy = frame.sy(*y);
                let _ = writeln!(
                    out,
                    "<line class=\"{class}\" x1=\"{}\" y1=\"{sy}\" x2=\"{}\" y2=\"{sy}\" stroke=\"#777\" stroke-dasharray=\"3,3\"/>",
                    frame.left,
                    frame.left + frame.width
                );
            }
        }
    }
    for (i, (colour, label)) in panel.legend.iter().enumerate() {
        let y = frame.top + 14.0 + 14.0 * i as f64;
        let x = frame.left + 10.0;
        let _ = writeln!(
            out,
            "<rect x=\"{x}\" y=\"{}\" width=\"10\" height=\"3\" fill=\"{colour}\"/>\
             <text x=\"{}\" y=\"{y}\" font-size=\"10\">{}</text>",
            y - 4.0,
            x + 14.0,
            escape(label)
        );
    }
    let _ = writeln!(out, "</g>");
}

/// Panels stacked vertically in one document.
pub fn render(title: &str, panels: &[Panel]) -> String {
    let rows = panels.len().max(1) as f64;
    let panel_height = if panels.len() > 1 { 260.0 } else { HEIGHT };
    let total_height = panel_height * rows;
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{total_height}\" viewBox=\"0 0 {WIDTH} {total_height}\">"
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    for (i, panel) in panels.iter().enumerate() {
        let top = panel_height * i as f64 + MARGIN[0];
        let origin = (MARGIN[3], top);
        let size = (WIDTH - MARGIN[1] - MARGIN[3], panel_height - MARGIN[0] - MARGIN[2]);
        render_panel(&mut out, panel, origin, size);
    }
    out.push_str("</svg>\n");
    out
}
