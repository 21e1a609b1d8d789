//! Minimal standalone SVG line plots. One polyline per series, plus
//! axes, tick labels and a legend. No external renderer needed.

use std::path::Path;

use crate::error::{Error, Result};

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PlotOptions {
    pub log_x: bool,
    pub log_y: bool,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const NUM_TICKS: usize = 5;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

fn escape_xml(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn transform(v: f64, log: bool, axis: &str) -> Result<f64> {
    if log {
        if v <= 0.0 {
            return Err(Error::Config(format!(
                "log {axis} axis requires positive values, got {v}"
            )));
        }
        Ok(v.ln())
    } else {
        Ok(v)
    }
}

pub fn render_lineplot(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    opts: PlotOptions,
) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Config("nothing to plot: no series data".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(x, y) in &s.points {
            xs.push(transform(x, opts.log_x, "x")?);
            ys.push(transform(y, opts.log_y, "y")?);
        }
    }
    let (x_min, x_max) = bounds(&xs);
    let (y_min, y_max) = bounds(&ys);
    let px = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let py = |y: f64| HEIGHT - MARGIN_BOTTOM - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        escape_xml(title)
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_BOTTOM,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM
    ));
    svg.push_str(&format!(
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{}\" stroke=\"black\"/>\n",
        HEIGHT - MARGIN_BOTTOM
    ));
    // ticks
    for i in 0..=NUM_TICKS {
        let t = i as f64 / NUM_TICKS as f64;
        let xv = x_min + t * (x_max - x_min);
        let yv = y_min + t * (y_max - y_min);
        let x_shown = if opts.log_x { xv.exp() } else { xv };
        let y_shown = if opts.log_y { yv.exp() } else { yv };
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
            px(xv),
            HEIGHT - MARGIN_BOTTOM,
            HEIGHT - MARGIN_BOTTOM + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{:.3}</text>\n",
            px(xv),
            HEIGHT - MARGIN_BOTTOM + 18.0,
            x_shown
        ));
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{1}\" x2=\"{MARGIN_LEFT}\" y2=\"{1}\" stroke=\"black\"/>\n",
            MARGIN_LEFT - 5.0,
            py(yv)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{:.3}</text>\n",
            MARGIN_LEFT - 8.0,
            py(yv) + 4.0,
            y_shown
        ));
    }
    // axis labels
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 10.0,
        escape_xml(x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
        (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        escape_xml(y_label)
    ));
    // series polylines and legend
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| {
                let tx = transform(x, opts.log_x, "x")?;
                let ty = transform(y, opts.log_y, "y")?;
                Ok(format!("{:.3},{:.3}", px(tx), py(ty)))
            })
            .collect::<Result<_>>()?;
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            color,
            pts.join(" ")
        ));
        let ly = MARGIN_TOP + 16.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{ly}\" x2=\"{1}\" y2=\"{ly}\" stroke=\"{2}\" stroke-width=\"1.5\"/>\n",
            WIDTH - MARGIN_RIGHT + 10.0,
            WIDTH - MARGIN_RIGHT + 34.0,
            color
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
            WIDTH - MARGIN_RIGHT + 40.0,
            ly + 4.0,
            escape_xml(&s.label)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    (lo, hi)
}

pub fn write_lineplot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    opts: PlotOptions,
) -> Result<()> {
    let svg = render_lineplot(title, x_label, y_label, series, opts)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
pub(crate) fn check_tag_balance(svg: &str) -> bool {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = svg;
    while let Some(start) = rest.find('<') {
        let Some(end_rel) = rest[start..].find('>') else {
            return false;
        };
        let tag = &rest[start + 1..start + end_rel];
        rest = &rest[start + end_rel + 1..];
        if let Some(name) = tag.strip_prefix('/') {
            if stack.pop().as_deref() != Some(name) {
                return false;
            }
        } else if !tag.ends_with('/') && !tag.starts_with('?') && !tag.starts_with('!') {
            let name: String = tag
                .chars()
                .take_while(|c| !c.is_whitespace())
                .collect();
            stack.push(name);
        }
    }
    stack.is_empty()
}
