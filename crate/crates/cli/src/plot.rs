//! Static SVG line plots of table columns.

use std::fmt::Write as _;

use crate::table::{format_number, Table};
use crate::CliError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// Classical bound drawn as a guide line for a column, from its name.
pub fn guide_for(column: &str) -> Option<f64> {
    let name = column.strip_prefix("min_").or_else(|| column.strip_prefix("max_")).unwrap_or(column);
    if name.starts_with("reid") || name.starts_with("wang") {
        Some(1.0)
    } else if name.starts_with("key") {
        Some(0.0)
    } else if name.starts_with("ds_") || name.starts_with("v_") {
        Some(4.0)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub x: Option<String>,
    /// Empty means every column except `x`.
    pub columns: Vec<String>,
    pub title: Option<String>,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    step * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the selected columns against the x column.
pub fn render_plot(table: &Table, spec: &PlotSpec) -> Result<String, CliError> {
    if table.rows.is_empty() {
        return Err(CliError::Usage("table has no rows to plot".into()));
    }
    let x_name = spec.x.clone().unwrap_or_else(|| table.columns[0].clone());
    let xs = table
        .column(&x_name)
        .ok_or_else(|| CliError::Usage(format!("no column named {x_name:?}")))?;
    let names: Vec<String> = if spec.columns.is_empty() {
        table.columns.iter().filter(|c| **c != x_name).cloned().collect()
    } else {
        spec.columns.clone()
    };
    if names.is_empty() {
        return Err(CliError::Usage("no columns to plot".into()));
    }
    let series = names
        .iter()
        .map(|n| {
            table
                .column(n)
                .map(|ys| (n.as_str(), ys))
                .ok_or_else(|| CliError::Usage(format!("no column named {n:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut guides: Vec<f64> = names.iter().filter_map(|n| guide_for(n)).collect();
    guides.sort_by(f64::total_cmp);
    guides.dedup();

    let (x0, x1) = padded_range(xs.iter().copied());
    let (y0, y1) = padded_range(series.iter().flat_map(|(_, ys)| ys.iter().copied()).chain(guides.iter().copied()));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;
    let f = |v: f64| format!("{v:.2}");

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(w, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    let title = spec.title.clone().unwrap_or_else(|| table.subcommand.clone());
    if !title.is_empty() {
        writeln!(w, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, f(LEFT + plot_w / 2.0), escape(&title)).unwrap();
    }
    writeln!(w, r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333"/>"##, f(LEFT), f(TOP), f(plot_w), f(plot_h)).unwrap();
    for t in ticks(x0, x1) {
        let x = f(px(t));
        writeln!(w, r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#333"/>"##, f(TOP + plot_h), f(TOP + plot_h + 5.0)).unwrap();
        writeln!(w, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, f(TOP + plot_h + 18.0), format_number(t)).unwrap();
    }
    for t in ticks(y0, y1) {
        let y = f(py(t));
        writeln!(w, r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#333"/>"##, f(LEFT - 5.0), f(LEFT)).unwrap();
        writeln!(w, r#"<text x="{}" y="{y}" text-anchor="end" dominant-baseline="middle">{}</text>"#, f(LEFT - 8.0), format_number(t)).unwrap();
    }
    writeln!(w, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, f(LEFT + plot_w / 2.0), f(HEIGHT - 12.0), escape(&x_name)).unwrap();
    for g in &guides {
        let y = f(py(*g));
        writeln!(w, r##"<line class="guide" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#888" stroke-dasharray="6 4"/>"##, f(LEFT), f(LEFT + plot_w)).unwrap();
    }
    for (k, (name, ys)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        let mut pen_down = false;
        for (x, y) in xs.iter().zip(ys) {
            if x.is_finite() && y.is_finite() {
                write!(d, "{}{},{} ", if pen_down { "L" } else { "M" }, f(px(*x)), f(py(*y))).unwrap();
                pen_down = true;
            } else {
                pen_down = false;
            }
        }
        writeln!(w, r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#, d.trim_end()).unwrap();
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = LEFT + plot_w + 12.0;
        writeln!(w, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{colour}" stroke-width="2"/>"#, f(lx), f(ly), f(lx + 20.0), f(ly)).unwrap();
        writeln!(w, r#"<text x="{}" y="{}" dominant-baseline="middle">{}</text>"#, f(lx + 26.0), f(ly), escape(name)).unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    Ok(svg)
}
