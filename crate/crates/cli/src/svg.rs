//! Minimal SVG plots: scatter and line charts on a fixed 800x600 canvas.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Tick positions at 1, 2 or 5 times a power of ten covering `[lo, hi]`.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    };
    let raw = (hi - lo) / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|f| f * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).floor() as i64;
    let last = (hi / step).ceil() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xticks: &[f64], yticks: &[f64]) -> Self {
        Self {
            x0: xticks[0],
            x1: *xticks.last().unwrap(),
            y0: yticks[0],
            y1: *yticks.last().unwrap(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="30" text-anchor="middle" font-family="sans-serif" font-size="18">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame, xticks: &[f64], yticks: &[f64], xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        r##"<g stroke="#888" stroke-width="1"><line x1="{m}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{m}" y1="{t}" x2="{m}" y2="{b}"/></g>"##,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    );
    for &x in xticks {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
            f.px(x),
            HEIGHT - MARGIN + 18.0,
            tick_label(x)
        );
    }
    for &y in yticks {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="12">{}</text>"#,
            MARGIN - 6.0,
            f.py(y) + 4.0,
            tick_label(y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 15 {:.2})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// Scatter plot with optional point labels.
pub fn scatter(title: &str, points: &[(f64, f64)], labels: Option<&[String]>) -> String {
    let (mut xlo, mut xhi) = range(points.iter().map(|p| p.0));
    let (mut ylo, mut yhi) = range(points.iter().map(|p| p.1));
    if !xlo.is_finite() {
        (xlo, xhi, ylo, yhi) = (0.0, 1.0, 0.0, 1.0);
    }
    let xticks = nice_ticks(xlo, xhi, 8);
    let yticks = nice_ticks(ylo, yhi, 6);
    let f = Frame::new(&xticks, &yticks);
    let mut out = String::new();
    header(&mut out, title);
    axes(
        &mut out,
        &f,
        &xticks,
        &yticks,
        "coordinate 1",
        "coordinate 2",
    );
    for (i, &(x, y)) in points.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
            f.px(x),
            f.py(y),
            COLORS[0]
        );
        if let Some(l) = labels.and_then(|l| l.get(i)) {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
                f.px(x) + 5.0,
                f.py(y) - 5.0,
                escape(l)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Line chart of several series over stage indices `0..len`.
pub fn line_chart(title: &str, xlabel: &str, series: &[(&str, Vec<f64>)]) -> String {
    let len = series.iter().map(|s| s.1.len()).max().unwrap_or(0);
    let (mut ylo, mut yhi) = range(series.iter().flat_map(|s| s.1.iter().copied()));
    if !ylo.is_finite() {
        (ylo, yhi) = (0.0, 1.0);
    }
    let xticks = nice_ticks(0.0, (len.max(2) - 1) as f64, 8);
    let yticks = nice_ticks(ylo.min(0.0), yhi, 6);
    let f = Frame::new(&xticks, &yticks);
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &f, &xticks, &yticks, xlabel, "value");
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = ys
            .iter()
            .enumerate()
            .filter(|(_, y)| y.is_finite())
            .map(|(i, &y)| format!("{:.2},{:.2}", f.px(i as f64), f.py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="13" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 150.0,
            MARGIN + 20.0 * (k as f64 + 1.0),
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    out
}
