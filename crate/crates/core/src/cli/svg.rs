use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::csv::{format_g, write_atomic};
use crate::correlations::Method;
use crate::error::{Error, Result};
use crate::experiments::{Measure, SweepResult};
use crate::model::Partition;

/// Panel order, row-major.
pub const PANELS: [Partition; 4] = [Partition::S1S2, Partition::R1R2, Partition::S1R1, Partition::S1R2];

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 760.0;
const TOP: f64 = 70.0;
const PANEL_W: f64 = 470.0;
const PANEL_H: f64 = 340.0;
const PAD_L: f64 = 62.0;
const PAD_R: f64 = 18.0;
const PAD_T: f64 = 30.0;
const PAD_B: f64 = 48.0;
const MAX_MARKERS: usize = 26;

/// One scenario drawn into every panel.
#[derive(Debug, Clone, Copy)]
pub struct Overlay<'a> {
    pub label: &'a str,
    pub result: &'a SweepResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Diamond,
    Square,
    Triangle,
    Circle,
}

/// Marker shape and colour for an (overlay, measure) pair: the first overlay
/// uses blue diamonds / magenta squares, the second dark triangles / red circles.
fn style(overlay: usize, m: Measure) -> (Shape, &'static str) {
    match (overlay % 2, m) {
        (0, Measure::Quantum) => (Shape::Diamond, "#1f3fd0"),
        (0, Measure::Classical) => (Shape::Square, "#c0189c"),
        (_, Measure::Quantum) => (Shape::Triangle, "#202020"),
        (_, Measure::Classical) => (Shape::Circle, "#d01818"),
        (0, Measure::Concurrence) => (Shape::Circle, "#1a8a3a"),
        (_, Measure::Concurrence) => (Shape::Triangle, "#1a8a3a"),
    }
}

fn dash(overlay: usize) -> &'static str {
    match overlay % 3 {
        0 => "",
        1 => " stroke-dasharray=\"7 4\"",
        _ => " stroke-dasharray=\"2 3\"",
    }
}

/// (time, value) for one partition, closed form preferred over brute force.
fn series(result: &SweepResult, partition: Partition, measure: Measure) -> Vec<(f64, f64)> {
    let mut by_time: BTreeMap<u64, (f64, Method, f64)> = BTreeMap::new();
    for r in result.records.iter().filter(|r| r.partition == partition) {
        let v = match measure {
            Measure::Quantum => r.quantum,
            Measure::Classical => r.classical,
            Measure::Concurrence => r.concurrence,
        };
        let slot = by_time.entry(r.time.to_bits()).or_insert((r.time, r.method, v));
        if r.method < slot.1 {
            *slot = (r.time, r.method, v);
        }
    }
    let mut out: Vec<(f64, f64)> = by_time.into_values().map(|(t, _, v)| (t, v)).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn fmt2(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Round axis maximum: 1, 2 or 5 times a power of ten.
fn nice_ceiling(v: f64) -> f64 {
    if v <= 0.0 || !v.is_finite() {
        return 1.0;
    }
    let p = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|k| k * p)
        .find(|c| *c >= v * (1.0 - 1e-12))
        .unwrap_or(10.0 * p)
}

fn marker(out: &mut String, shape: Shape, c: &str, x: f64, y: f64) {
    let _ = match shape {
        Shape::Diamond => writeln!(
            out,
            "<polygon points=\"{},{} {},{} {},{} {},{}\" fill=\"{c}\"/>",
            fmt2(x),
            fmt2(y - 4.5),
            fmt2(x + 4.5),
            fmt2(y),
            fmt2(x),
            fmt2(y + 4.5),
            fmt2(x - 4.5),
            fmt2(y)
        ),
        Shape::Triangle => writeln!(
            out,
            "<polygon points=\"{},{} {},{} {},{}\" fill=\"{c}\"/>",
            fmt2(x),
            fmt2(y - 4.5),
            fmt2(x + 4.0),
            fmt2(y + 3.5),
            fmt2(x - 4.0),
            fmt2(y + 3.5)
        ),
        Shape::Square => writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"7\" height=\"7\" fill=\"{c}\"/>",
            fmt2(x - 3.5),
            fmt2(y - 3.5)
        ),
        Shape::Circle => writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{c}\"/>",
            fmt2(x),
            fmt2(y)
        ),
    };
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Static SVG 1.1 document with one panel per partition in `PANELS`.
///
/// Every overlay must share the time axis symbol of the first one.
pub fn render_svg(title: &str, overlays: &[Overlay<'_>], measures: &[Measure]) -> Result<String> {
    if overlays.is_empty() || overlays.iter().all(|o| o.result.records.is_empty()) {
        return Err(Error::EmptyRecords);
    }
    if measures.is_empty() {
        return Err(Error::Domain("no measures to plot".into()));
    }
    let time_symbol = overlays[0].result.scenario.spectral.time_symbol();
    let (t_min, t_max) = overlays
        .iter()
        .flat_map(|o| o.result.records.iter().map(|r| r.time))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
    let t_span = if t_max > t_min { t_max - t_min } else { 1.0 };

    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    legend(&mut out, overlays, measures);

    for (k, &partition) in PANELS.iter().enumerate() {
        let ox = 10.0 + (k % 2) as f64 * PANEL_W;
        let oy = TOP + (k / 2) as f64 * PANEL_H;
        let (x0, x1) = (ox + PAD_L, ox + PANEL_W - PAD_R);
        let (y0, y1) = (oy + PAD_T, oy + PANEL_H - PAD_B);

        let data: Vec<Vec<(Measure, Vec<(f64, f64)>)>> = overlays
            .iter()
            .map(|o| measures.iter().map(|&m| (m, series(o.result, partition, m))).collect())
            .collect();
        let v_max = data
            .iter()
            .flatten()
            .flat_map(|(_, s)| s.iter().map(|p| p.1))
            .fold(0.0_f64, f64::max);
        let y_top = nice_ceiling(v_max);
        let sx = |t: f64| x0 + (t - t_min) / t_span * (x1 - x0);
        let sy = |v: f64| y1 - (v.clamp(0.0, y_top) / y_top) * (y1 - y0);

        let _ = writeln!(out, "<g id=\"panel-{}\">", partition.label());
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            fmt2(x0),
            fmt2(y0),
            fmt2(x1 - x0),
            fmt2(y1 - y0)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">({}) {}</text>",
            fmt2((x0 + x1) / 2.0),
            fmt2(y0 - 10.0),
            (b'a' + k as u8) as char,
            partition.label()
        );
        for i in 0..=5 {
            let f = i as f64 / 5.0;
            let (tx, ty) = (x0 + f * (x1 - x0), y1 - f * (y1 - y0));
            let _ = writeln!(
                out,
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/><text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\">{4}</text>",
                fmt2(tx),
                fmt2(y1),
                fmt2(y1 + 5.0),
                fmt2(y1 + 18.0),
                format_g(((t_min + f * t_span) * 1e6).round() / 1e6)
            );
            let _ = writeln!(
                out,
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/><text x=\"{3}\" y=\"{4}\" text-anchor=\"end\">{5}</text>",
                fmt2(x0 - 5.0),
                fmt2(ty),
                fmt2(x0),
                fmt2(x0 - 8.0),
                fmt2(ty + 4.0),
                format_g(((f * y_top) * 1e6).round() / 1e6)
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{time_symbol}</text>",
            fmt2((x0 + x1) / 2.0),
            fmt2(y1 + 36.0)
        );
        let _ = writeln!(
            out,
            "<text x=\"{0}\" y=\"{1}\" text-anchor=\"middle\" transform=\"rotate(-90 {0} {1})\">bits</text>",
            fmt2(ox + 16.0),
            fmt2((y0 + y1) / 2.0)
        );

        for (j, per_measure) in data.iter().enumerate() {
            for (m, pts) in per_measure {
                let (shape, c) = style(j, *m);
                if pts.len() >= 2 {
                    let mut d = String::new();
                    for (i, &(t, v)) in pts.iter().enumerate() {
                        let _ = write!(d, "{}{},{}", if i == 0 { "M" } else { " L" }, fmt2(sx(t)), fmt2(sy(v)));
                    }
                    let _ = writeln!(
                        out,
                        "<path d=\"{d}\" fill=\"none\" stroke=\"{c}\" stroke-width=\"1.2\"{}/>",
                        dash(j)
                    );
                }
                let stride = pts.len().div_ceil(MAX_MARKERS).max(1);
                for &(t, v) in pts.iter().step_by(stride) {
                    marker(&mut out, shape, c, sx(t), sy(v));
                }
            }
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

fn legend(out: &mut String, overlays: &[Overlay<'_>], measures: &[Measure]) {
    let mut x = 80.0;
    let y = 48.0;
    for (j, o) in overlays.iter().enumerate() {
        for &m in measures {
            let (shape, c) = style(j, m);
            let _ = writeln!(
                out,
                "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{c}\" stroke-width=\"1.2\"{}/>",
                fmt2(x),
                fmt2(x + 28.0),
                dash(j)
            );
            marker(out, shape, c, x + 14.0, y);
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\">{} {}</text>",
                fmt2(x + 34.0),
                fmt2(y + 4.0),
                m.label(),
                escape(o.label)
            );
            x += 150.0;
        }
    }
}

pub fn emit_svg_plot(result: &SweepResult, measures: &[Measure], path: &Path) -> Result<()> {
    let title = format!(
        "{} {}",
        result.scenario.family.label(),
        if result.scenario.spectral.is_flat() { "flat" } else { "lorentz" }
    );
    let doc = render_svg(&title, &[Overlay { label: "", result }], measures)?;
    write_atomic(path, doc.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::Side;
    use crate::experiments::{run_sweep, Pipeline, SweepOptions};
    use crate::model::{Family, Scenario, SpectralDensity};
    use num_complex::Complex64;

    fn sweep(times: Vec<f64>) -> SweepResult {
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = Scenario::new(Family::TwoExcitation, r, r, SpectralDensity::flat(1.0).unwrap(), times).unwrap();
        let opts = SweepOptions {
            optimizer: crate::correlations::OptimizerSettings::new(24, 2).unwrap(),
            side: Side::Second,
        };
        run_sweep(&s, &PANELS, Pipeline::Both, opts).unwrap()
    }

    #[test]
    fn four_panels_with_curves() {
        let res = sweep(vec![0.0, 1.0, 2.0]);
        let doc = render_svg("t", &[Overlay { label: "bell", result: &res }], &[Measure::Quantum, Measure::Classical])
            .unwrap();
        assert!(doc.starts_with("<?xml"));
        assert!(doc.trim_end().ends_with("</svg>"));
        for p in PANELS {
            assert!(doc.contains(&format!("id=\"panel-{}\"", p.label())));
        }
        assert_eq!(doc.matches("<path ").count(), 8);
        assert!(doc.contains(">γt</text>"));
    }

    #[test]
    fn single_time_point_has_only_markers() {
        let res = sweep(vec![0.5]);
        let doc = render_svg("t", &[Overlay { label: "bell", result: &res }], &[Measure::Quantum, Measure::Classical])
            .unwrap();
        assert!(!doc.contains("<path"));
        assert!(doc.contains("<polygon") && doc.contains("<rect x"));
    }

    #[test]
    fn empty_is_rejected() {
        let mut res = sweep(vec![0.0]);
        res.records.clear();
        assert!(matches!(
            render_svg("t", &[Overlay { label: "", result: &res }], &[Measure::Quantum]),
            Err(Error::EmptyRecords)
        ));
    }

    #[test]
    fn ceilings() {
        assert_eq!(nice_ceiling(0.0), 1.0);
        assert_eq!(nice_ceiling(1.0), 1.0);
        assert_eq!(nice_ceiling(0.47), 0.5);
        assert_eq!(nice_ceiling(1.2), 2.0);
    }
}
