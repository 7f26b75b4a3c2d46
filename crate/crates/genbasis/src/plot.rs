//! Tiny dependency-free SVG charts for round metrics and accuracy
//! comparisons. Layout is fixed-size; callers only supply data and labels.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axis_bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if (hi - lo).abs() < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        esc(title)
    )
}

fn axes(x_label: &str, y_label: &str) -> String {
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        esc(x_label),
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        esc(y_label)
    )
}

fn tick_labels(lo: f64, hi: f64, vertical: bool) -> String {
    let mut out = String::new();
    let n = 5;
    for i in 0..=n {
        let t = i as f64 / n as f64;
        let v = lo + (hi - lo) * t;
        let label = if (hi - lo) >= 10.0 {
            format!("{v:.0}")
        } else {
            format!("{v:.3}")
        };
        if vertical {
            let y = (HEIGHT - MARGIN_B) - t * (HEIGHT - MARGIN_T - MARGIN_B);
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{label}</text>\n",
                MARGIN_L - 6.0,
                y + 4.0
            ));
        } else {
            let x = MARGIN_L + t * (WIDTH - MARGIN_L - MARGIN_R);
            out.push_str(&format!(
                "<text x=\"{x}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{label}</text>\n",
                HEIGHT - MARGIN_B + 16.0
            ));
        }
    }
    out
}

/// Multi-series line chart; each series is drawn in its own color with a
/// small legend at the top right.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series<'_>],
    path: &Path,
) -> Result<()> {
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::input("nothing to plot"));
    }
    let (x_lo, x_hi) = axis_bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y_lo, y_hi) = axis_bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
    let sy = |y: f64| (HEIGHT - MARGIN_B) - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = svg_open(title);
    svg.push_str(&axes(x_label, y_label));
    svg.push_str(&tick_labels(x_lo, x_hi, false));
    svg.push_str(&tick_labels(y_lo, y_hi, true));
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let d: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            d.join(" ")
        ));
        let ly = MARGIN_T + 16.0 * i as f64;
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"3\" fill=\"{color}\"/>\n\
             <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            WIDTH - MARGIN_R - 160.0,
            ly - 2.0,
            WIDTH - MARGIN_R - 142.0,
            ly + 3.0,
            esc(s.name)
        ));
    }
    svg.push_str("</svg>\n");
    fs::write(path, svg)?;
    Ok(())
}

/// Bar chart with optional error bars (one sigma each way).
pub fn bar_chart(
    title: &str,
    y_label: &str,
    bars: &[(String, f64, f64)],
    path: &Path,
) -> Result<()> {
    if bars.is_empty() {
        return Err(Error::input("nothing to plot"));
    }
    let (mut y_lo, y_hi) = axis_bounds(bars.iter().flat_map(|b| [b.1 - b.2, b.1 + b.2]));
    y_lo = y_lo.min(0.0_f64.min(y_hi));
    let sy = |y: f64| (HEIGHT - MARGIN_B) - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);

    let span = WIDTH - MARGIN_L - MARGIN_R;
    let slot = span / bars.len() as f64;
    let bar_w = slot * 0.6;

    let mut svg = svg_open(title);
    svg.push_str(&axes("", y_label));
    svg.push_str(&tick_labels(y_lo, y_hi, true));
    for (i, (name, mean, sigma)) in bars.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let cx = MARGIN_L + slot * (i as f64 + 0.5);
        let x = cx - bar_w / 2.0;
        let y = sy(*mean);
        let base = sy(y_lo.max(0.0));
        let (top, h) = if y <= base { (y, base - y) } else { (base, y - base) };
        svg.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{top:.2}\" width=\"{bar_w:.2}\" height=\"{h:.2}\" fill=\"{color}\" fill-opacity=\"0.8\"/>\n"
        ));
        if *sigma > 0.0 {
            let y_top = sy(mean + sigma);
            let y_bot = sy(mean - sigma);
            svg.push_str(&format!(
                "<line x1=\"{cx:.2}\" y1=\"{y_top:.2}\" x2=\"{cx:.2}\" y2=\"{y_bot:.2}\" stroke=\"black\"/>\n\
                 <line x1=\"{:.2}\" y1=\"{y_top:.2}\" x2=\"{:.2}\" y2=\"{y_top:.2}\" stroke=\"black\"/>\n\
                 <line x1=\"{:.2}\" y1=\"{y_bot:.2}\" x2=\"{:.2}\" y2=\"{y_bot:.2}\" stroke=\"black\"/>\n",
                cx - 5.0, cx + 5.0, cx - 5.0, cx + 5.0
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{cx:.2}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            HEIGHT - MARGIN_B + 16.0,
            esc(name)
        ));
    }
    svg.push_str("</svg>\n");
    fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn line_chart_writes_valid_svg_with_all_series() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rounds.svg");
        let series = [
            Series {
                name: "basis size",
                points: vec![(0.0, 20.0), (1.0, 28.0), (2.0, 36.0)],
            },
            Series {
                name: "unanimous correct",
                points: vec![(0.0, 310.0), (1.0, 355.0), (2.0, 400.0)],
            },
        ];
        line_chart("loop progress", "round", "count", &series, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert_eq!(text.matches("<polyline").count(), 2);
        assert!(text.contains("unanimous correct"));
    }

    #[test]
    fn bar_chart_draws_error_bars() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("acc.svg");
        let bars = vec![
            ("selected".to_string(), 0.999, 0.0008),
            ("prefix".to_string(), 0.971, 0.0018),
        ];
        bar_chart("basis vs prefix", "accuracy", &bars, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches("<rect").count(), 3); // background + 2 bars
        assert!(text.contains("selected") && text.contains("prefix"));
    }

    #[test]
    fn empty_input_is_rejected() {
        let dir = tempdir().unwrap();
        assert!(line_chart("t", "x", "y", &[], &dir.path().join("a.svg")).is_err());
        assert!(bar_chart("t", "y", &[], &dir.path().join("b.svg")).is_err());
    }
}
