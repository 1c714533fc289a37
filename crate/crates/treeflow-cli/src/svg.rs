//! Self-contained SVG rendering of risk curves: a log-log scatter per
//! series, the fitted power-law line, and a slope annotation. No external
//! assets, so the file is a reproducible artifact.

use anyhow::{bail, Result};
use treeflow::sim::ExponentFit;

/// One plotted series: a label, `(size, value)` points with positive
/// coordinates, and optionally the log-log line fitted to them.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub fit: Option<ExponentFit>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 56.0;

const PALETTE: &[&str] = &[
    "#1f6feb", "#d4582a", "#2da44e", "#8250df", "#bf3989", "#57606a",
];

/// Renders the series to an SVG document string. Every coordinate must be
/// strictly positive since both axes are logarithmic.
pub fn render_svg(series: &[Series], title: &str) -> Result<String> {
    if series.is_empty() {
        bail!("nothing to plot: no series");
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        if s.points.is_empty() {
            bail!("series {:?} has no points", s.label);
        }
        for &(x, y) in &s.points {
            if !(x > 0.0) || !(y > 0.0) {
                bail!(
                    "series {:?} has nonpositive point ({x}, {y}); log axes need positive data",
                    s.label
                );
            }
            xs.push(x.ln());
            ys.push(y.ln());
        }
    }
    let (x_lo, x_hi) = padded_range(&xs);
    let (y_lo, y_hi) = padded_range(&ys);
    let px = |lx: f64| MARGIN_L + (lx - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
    let py = |ly: f64| HEIGHT - MARGIN_B - (ly - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        escape(title)
    ));

    // Frame and axis labels.
    out.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#57606a\"/>\n",
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B
    ));
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">size (log scale)</text>\n",
        (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
        HEIGHT - 14.0
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">mean squared error (log scale)</text>\n",
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
        (MARGIN_T + HEIGHT - MARGIN_B) / 2.0
    ));

    // Ticks at the extremes and midpoint of each axis, labeled in data units.
    for frac in [0.0, 0.5, 1.0] {
        let lx = x_lo + frac * (x_hi - x_lo);
        let ly = y_lo + frac * (y_hi - y_lo);
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#57606a\"/>\n",
            px(lx),
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            px(lx),
            HEIGHT - MARGIN_B + 18.0,
            format_tick(lx.exp())
        ));
        out.push_str(&format!(
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#57606a\"/>\n",
            py(ly),
            MARGIN_L - 5.0,
            MARGIN_L
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 8.0,
            py(ly) + 4.0,
            format_tick(ly.exp())
        ));
    }

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if let Some(fit) = &s.fit {
            let ly_lo = fit.intercept + fit.slope * x_lo;
            let ly_hi = fit.intercept + fit.slope * x_hi;
            out.push_str(&format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
                px(x_lo),
                py(ly_lo),
                px(x_hi),
                py(ly_hi),
                color
            ));
        }
        for &(x, y) in &s.points {
            out.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{}\"/>\n",
                px(x.ln()),
                py(y.ln()),
                color
            ));
        }
    }

    // Legend with one row per series; fitted slopes are annotated here so
    // overlapping lines stay readable.
    let legend_x = WIDTH - MARGIN_R + 12.0;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let row_y = MARGIN_T + 16.0 + i as f64 * 36.0;
        out.push_str(&format!(
            "<rect x=\"{legend_x}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n",
            row_y - 10.0
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{row_y}\">{}</text>\n",
            legend_x + 18.0,
            escape(&s.label)
        ));
        if let Some(fit) = &s.fit {
            out.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" fill=\"#57606a\">slope {:.3} (se {:.3})</text>\n",
                legend_x + 18.0,
                row_y + 15.0,
                fit.slope,
                fit.slope_stderr
            ));
        }
    }

    out.push_str("</svg>\n");
    Ok(out)
}

fn padded_range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo).max(1e-9);
    (lo - 0.06 * spread, hi + 0.06 * spread)
}

fn format_tick(v: f64) -> String {
    if v >= 100.0 {
        format!("{v:.0}")
    } else if v >= 1.0 {
        format!("{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
