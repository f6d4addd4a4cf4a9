//! Two-panel SVG: coincidences with Poisson error bars on top, singles below.

use std::fmt::Write;

use revphase_core::fit::FitSummary;
use revphase_core::FringeDataset;

const WIDTH: f64 = 900.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 870.0;
const COINC_PANEL: (f64, f64) = (40.0, 320.0);
const SINGLES_PANEL: (f64, f64) = (380.0, 640.0);
const HEIGHT: f64 = 700.0;
const MODEL_SAMPLES: usize = 360;
const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, px_lo: f64, px_hi: f64) -> Self {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        Axis { lo, hi, px_lo, px_hi }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

fn polyline(out: &mut String, id: &str, color: &str, extra: &str, pts: impl Iterator<Item = (f64, f64)>) {
    let coords: Vec<String> = pts.map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    writeln!(
        out,
        r#"<polyline id="{id}" fill="none" stroke="{color}" stroke-width="1.5"{extra} points="{}"/>"#,
        coords.join(" ")
    )
    .unwrap();
}

fn frame(out: &mut String, x: &Axis, y: &Axis, title: &str, ylabel: &str) {
    let (top, bottom) = (y.px_hi, y.px_lo);
    writeln!(
        out,
        r#"<rect x="{LEFT}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        bottom - top
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{title}</text>"#,
        (LEFT + RIGHT) / 2.0,
        top - 10.0
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="20" y="{0}" transform="rotate(-90 20 {0})" text-anchor="middle" font-size="12">{ylabel}</text>"#,
        (top + bottom) / 2.0
    )
    .unwrap();
    for i in 0..=4 {
        let v = y.lo + (y.hi - y.lo) * i as f64 / 4.0;
        let py = y.map(v);
        writeln!(
            out,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="10">{}</text>"#,
            LEFT - 5.0,
            py + 3.0,
            fmt_tick(v)
        )
        .unwrap();
    }
    for i in 0..=4 {
        let v = x.lo + (x.hi - x.lo) * i as f64 / 4.0;
        let px = x.map(v);
        writeln!(
            out,
            r#"<text x="{px:.2}" y="{}" text-anchor="middle" font-size="10">{:.0}</text>"#,
            bottom + 14.0,
            v.to_degrees()
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">phase (deg)</text>"#,
        (LEFT + RIGHT) / 2.0,
        bottom + 30.0
    )
    .unwrap();
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1e4 {
        format!("{v:.2e}")
    } else {
        format!("{v:.0}")
    }
}

/// Model phases covering one grid period beyond the first point.
fn model_phases(phases: &[f64]) -> Vec<f64> {
    let first = phases[0];
    let last = phases[phases.len() - 1];
    let span = if phases.len() > 1 {
        (last - first) * phases.len() as f64 / (phases.len() - 1) as f64
    } else {
        1.0
    };
    (0..MODEL_SAMPLES)
        .map(|i| first + span * i as f64 / MODEL_SAMPLES as f64)
        .collect()
}

pub fn render(data: &FringeDataset, summary: Option<&FitSummary>) -> String {
    let phases = data.phases();
    let coinc: Vec<f64> = data.coincidence_column().iter().map(|&c| c as f64).collect();
    let n = data.detectors();
    let x_lo = phases.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_hi = phases.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let x = Axis::new(x_lo, x_hi, LEFT, RIGHT);

    let mut out = String::new();
    writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">
<rect width="100%" height="100%" fill="white"/>"#
    )
    .unwrap();

    let c_hi = coinc.iter().map(|c| c + c.sqrt()).fold(0.0, f64::max);
    let yc = Axis::new(0.0, c_hi.max(1.0) * 1.05, COINC_PANEL.1, COINC_PANEL.0);
    frame(&mut out, &x, &yc, &format!("{n}-fold coincidences"), "counts");
    out.push_str("<g id=\"coinc-errorbars\" stroke=\"#555\">\n");
    for (p, c) in phases.iter().zip(&coinc) {
        let px = x.map(*p);
        let s = c.sqrt();
        writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}"/>"#,
            yc.map(c - s),
            yc.map(c + s)
        )
        .unwrap();
    }
    out.push_str("</g>\n<g id=\"coinc-points\" fill=\"black\">\n");
    for (p, c) in phases.iter().zip(&coinc) {
        writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5"/>"#, x.map(*p), yc.map(*c)).unwrap();
    }
    out.push_str("</g>\n");
    if let Some(product) = summary.and_then(|s| s.product.as_ref()) {
        let mp = model_phases(&phases);
        polyline(
            &mut out,
            "coinc-model",
            "#d62728",
            "",
            mp.iter().map(|&p| (x.map(p), yc.map(product.evaluate(p)))),
        );
    }

    let singles: Vec<Vec<f64>> = (0..n)
        .map(|k| data.singles_column(k).iter().map(|&c| c as f64).collect())
        .collect();
    let s_hi = singles.iter().flatten().cloned().fold(0.0, f64::max);
    let ys = Axis::new(0.0, s_hi.max(1.0) * 1.05, SINGLES_PANEL.1, SINGLES_PANEL.0);
    frame(&mut out, &x, &ys, "singles", "counts");
    for (k, col) in singles.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        polyline(
            &mut out,
            &format!("singles-{}", k + 1),
            color,
            "",
            phases.iter().zip(col).map(|(p, c)| (x.map(*p), ys.map(*c))),
        );
        if let Some(curve) = summary.and_then(|s| s.overlay.get(k)) {
            polyline(
                &mut out,
                &format!("singles-{}-fit", k + 1),
                color,
                r#" stroke-dasharray="4 3""#,
                phases.iter().zip(&curve.values).map(|(p, v)| (x.map(*p), ys.map(*v))),
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
