//! Self-contained SVG plots: polyline charts and labeled bar charts on a
//! fixed 800×600 canvas. No plotting dependency; coordinates are formatted
//! with fixed precision so output is deterministic.

use std::fmt::Write as _;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

/// Fixed palette, one stroke per series.
pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw markers at the points in addition to the polyline.
    pub markers: bool,
}

fn canvas(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// A polyline chart of one or more (x, y) series with linear axes.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let mut svg = canvas(title);
    let (x0, x1, y1) = bounds(series);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_x = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let to_y = |y: f64| HEIGHT - MARGIN_BOTTOM - y / y1 * plot_h;

    axes(&mut svg, x_label, y_label);
    // ticks: five divisions on each axis
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let px = to_x(fx);
        let _ = writeln!(
            svg,
            "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            HEIGHT - MARGIN_BOTTOM,
            HEIGHT - MARGIN_BOTTOM + 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{fx:.2}</text>",
            HEIGHT - MARGIN_BOTTOM + 18.0
        );
        let fy = y1 * i as f64 / 5.0;
        let py = to_y(fy);
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>",
            MARGIN_LEFT - 5.0,
            MARGIN_LEFT
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{fy:.4}</text>",
            MARGIN_LEFT - 8.0,
            py + 4.0
        );
    }

    for (index, s) in series.iter().enumerate() {
        let color = PALETTE[index % PALETTE.len()];
        if s.points.len() > 1 {
            let mut d = String::new();
            for &(x, y) in &s.points {
                let _ = write!(d, "{:.2},{:.2} ", to_x(x), to_y(y));
            }
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                d.trim_end()
            );
        }
        if s.markers {
            for &(x, y) in &s.points {
                let _ = writeln!(
                    svg,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>",
                    to_x(x),
                    to_y(y)
                );
            }
        }
        // legend entry
        let ly = MARGIN_TOP + 16.0 * index as f64;
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            WIDTH - 170.0,
            WIDTH - 146.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            WIDTH - 140.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Bar chart over labeled outcomes, values printed above each bar.
pub fn bar_chart(title: &str, y_label: &str, bars: &[(String, f64)]) -> String {
    let mut svg = canvas(title);
    axes(&mut svg, "outcome", y_label);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let y_max = bars.iter().map(|b| b.1).fold(1e-12, f64::max) * 1.15;
    let slot = plot_w / bars.len() as f64;
    let bar_w = (slot * 0.7).min(60.0);

    for (index, (label, value)) in bars.iter().enumerate() {
        let cx = MARGIN_LEFT + slot * (index as f64 + 0.5);
        let h = value / y_max * plot_h;
        let y = HEIGHT - MARGIN_BOTTOM - h;
        let _ = writeln!(
            svg,
            "<rect x=\"{:.2}\" y=\"{y:.2}\" width=\"{bar_w:.2}\" height=\"{h:.2}\" fill=\"{}\"/>",
            cx - bar_w / 2.0,
            PALETTE[0]
        );
        let _ = writeln!(
            svg,
            "<text x=\"{cx:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            HEIGHT - MARGIN_BOTTOM + 16.0,
            escape(label)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{cx:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{value:.3}</text>",
            y - 5.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn axes(svg: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
        HEIGHT - MARGIN_BOTTOM,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{:.2}\" stroke=\"black\"/>",
        HEIGHT - MARGIN_BOTTOM
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"18\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">{}</text>",
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        escape(y_label)
    );
}

fn bounds(series: &[Series]) -> (f64, f64, f64) {
    let mut x0 = f64::INFINITY;
    let mut x1 = f64::NEG_INFINITY;
    let mut y1 = 1e-12f64;
    for s in series {
        for &(x, y) in &s.points {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
    }
    if !x0.is_finite() || x1 <= x0 {
        (0.0, 1.0, y1 * 1.1)
    } else {
        (x0, x1, y1 * 1.1)
    }
}
