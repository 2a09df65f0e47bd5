//! Self-contained SVG charts for sweep results.
//!
//! Output is plain text assembled with fixed-precision coordinates, so equal
//! inputs always give byte-identical documents.

use std::fmt::Write;

use crate::error::{invalid, Result};
use crate::sweep::{row_thd_db, SweepKind, SweepResult, SweepRow};

use super::format_number;

pub const BLUE: (u8, u8, u8) = (0, 0, 255);
pub const YELLOW: (u8, u8, u8) = (255, 255, 0);
const MISSING: &str = "#d0d0d0";
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    LogXLine,
    LinearLine,
    Heatmap,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartStyle {
    pub kind: ChartKind,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Log-scaled value axis (line charts only).
    pub log_y: bool,
    pub width: u32,
    pub height: u32,
}

impl ChartStyle {
    pub fn new(kind: ChartKind, title: &str, x_label: &str, y_label: &str) -> Self {
        ChartStyle {
            kind,
            title: title.to_owned(),
            x_label: x_label.to_owned(),
            y_label: y_label.to_owned(),
            log_y: false,
            width: 800,
            height: 600,
        }
    }

    pub fn bits_error() -> Self {
        ChartStyle {
            log_y: true,
            ..Self::new(
                ChartKind::LinearLine,
                "Maximum absolute error vs. bit count",
                "Number of bits",
                "Maximum absolute error (%)",
            )
        }
    }

    pub fn bits_thd() -> Self {
        Self::new(ChartKind::LinearLine, "THD vs. bit count", "Number of bits", "THD (dB)")
    }

    pub fn multiplier_error() -> Self {
        Self::new(
            ChartKind::LogXLine,
            "Maximum absolute error vs. frequency multiplier",
            "Frequency multiplier",
            "Maximum absolute error",
        )
    }

    pub fn multiplier_thd() -> Self {
        Self::new(
            ChartKind::LogXLine,
            "THD vs. frequency multiplier",
            "Frequency multiplier",
            "THD (dB)",
        )
    }

    pub fn heatmap(metric: HeatMetric) -> Self {
        let title = match metric {
            HeatMetric::MaxError => "Maximum absolute error",
            HeatMetric::ThdDb => "THD (dB)",
        };
        Self::new(ChartKind::Heatmap, title, "Frequency multiplier", "Number of bits")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Series {
    MaxError,
    MaxErrorPct,
    ThdDb,
    PaperBound,
    StrictBound,
}

impl Series {
    fn key(&self) -> &'static str {
        match self {
            Series::MaxError => "max_err",
            Series::MaxErrorPct => "max_err_pct",
            Series::ThdDb => "thd_db",
            Series::PaperBound => "paper_bound",
            Series::StrictBound => "strict_bound",
        }
    }

    fn value(&self, row: &SweepRow) -> Option<f64> {
        let r = &row.report;
        match self {
            Series::MaxError => Some(r.max_abs_error),
            Series::MaxErrorPct => Some(r.max_abs_error_pct()),
            Series::ThdDb => row_thd_db(row),
            Series::PaperBound => Some(r.paper_bound),
            Series::StrictBound => Some(r.strict_bound),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeatMetric {
    MaxError,
    ThdDb,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn hex((r, g, b): (u8, u8, u8)) -> String {
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Linear blue→yellow ramp; `t` is clamped to `[0, 1]`.
pub fn ramp_color(t: f64) -> String {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let mix = |a: u8, b: u8| (a as f64 + t * (b as f64 - a as f64)).round() as u8;
    hex((
        mix(BLUE.0, YELLOW.0),
        mix(BLUE.1, YELLOW.1),
        mix(BLUE.2, YELLOW.2),
    ))
}

/// Data range on one axis, already in log10 units when `log` is set.
struct Axis {
    lo: f64,
    hi: f64,
    ticks: Vec<(f64, String)>,
}

impl Axis {
    fn fit(values: &[f64], log: bool) -> Axis {
        let (mut lo, mut hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if log {
            lo = lo.floor();
            hi = hi.ceil();
            if hi <= lo {
                hi = lo + 1.0;
            }
            let ticks = (lo as i32..=hi as i32)
                .map(|k| (k as f64, format_number(10f64.powi(k))))
                .collect();
            return Axis { lo, hi, ticks };
        }
        if hi <= lo {
            lo -= 1.0;
            hi += 1.0;
        }
        let step = nice_step((hi - lo) / 6.0);
        let first = (lo / step).floor() as i64;
        let last = (hi / step).ceil() as i64;
        let decimals = (-step.log10().floor()).max(0.0) as usize;
        let ticks = (first..=last)
            .map(|i| {
                let v = i as f64 * step;
                (v, format!("{:.*}", decimals, v + 0.0))
            })
            .collect();
        Axis {
            lo: first as f64 * step,
            hi: last as f64 * step,
            ticks,
        }
    }

    fn frac(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r <= 1.0 {
        1.0
    } else if r <= 2.0 {
        2.0
    } else if r <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

fn open_svg(out: &mut String, style: &ChartStyle) {
    let (w, h) = (style.width, style.height);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        w as f64 / 2.0,
        escape(&style.title)
    );
}

fn axis_labels(out: &mut String, style: &ChartStyle, f: &Frame) {
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        f.left + f.width / 2.0,
        f.top + f.height + 48.0,
        escape(&style.x_label)
    );
    let (x, y) = (22.0, f.top + f.height / 2.0);
    let _ = writeln!(
        out,
        r#"<text x="{x:.2}" y="{y:.2}" text-anchor="middle" transform="rotate(-90 {x:.2} {y:.2})">{}</text>"#,
        escape(&style.y_label)
    );
}

fn row_x(kind: SweepKind, row: &SweepRow) -> Result<f64> {
    match kind {
        SweepKind::Bits => Ok(row.bits().unwrap_or(0) as f64),
        SweepKind::Multiplier => Ok(row.timing().map_or(f64::NAN, |t| t.multiplier())),
        SweepKind::Grid => Err(invalid("line charts need a one-dimensional sweep")),
    }
}

/// Line chart with one polyline per selected series.
pub fn render_line_chart(result: &SweepResult, style: &ChartStyle, series: &[Series]) -> Result<String> {
    if series.is_empty() {
        return Err(invalid("no series selected"));
    }
    if result.rows.is_empty() {
        return Err(invalid("sweep has no rows"));
    }
    let log_x = style.kind == ChartKind::LogXLine;
    let tx = |v: f64| if log_x { v.log10() } else { v };
    let ty = |v: f64| if style.log_y { v.log10() } else { v };

    let mut lines: Vec<Vec<(f64, f64)>> = Vec::new();
    for s in series {
        let mut pts = Vec::new();
        for row in &result.rows {
            let x = tx(row_x(result.kind, row)?);
            if let Some(y) = s.value(row).map(ty) {
                if x.is_finite() && y.is_finite() {
                    pts.push((x, y));
                }
            }
        }
        lines.push(pts);
    }
    let xs: Vec<f64> = lines.iter().flatten().map(|p| p.0).collect();
    let ys: Vec<f64> = lines.iter().flatten().map(|p| p.1).collect();
    if xs.is_empty() {
        return Err(invalid("selected series have no finite values"));
    }
    let ax = Axis::fit(&xs, log_x);
    let ay = Axis::fit(&ys, style.log_y);

    let f = Frame {
        left: 80.0,
        top: 50.0,
        width: style.width as f64 - 80.0 - 150.0,
        height: style.height as f64 - 50.0 - 70.0,
    };
    let px = |x: f64| f.left + ax.frac(x) * f.width;
    let py = |y: f64| f.top + (1.0 - ay.frac(y)) * f.height;

    let mut out = String::new();
    open_svg(&mut out, style);
    let _ = writeln!(out, r##"<g class="axes" stroke="#000000" stroke-width="1">"##);
    let _ = writeln!(
        out,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none"/>"#,
        f.left, f.top, f.width, f.height
    );
    for (v, _) in &ax.ticks {
        let x = px(*v);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}"/>"#,
            f.top + f.height,
            f.top + f.height + 5.0
        );
    }
    for (v, _) in &ay.ticks {
        let y = py(*v);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}"/>"#,
            f.left - 5.0,
            f.left
        );
    }
    let _ = writeln!(out, "</g>");
    for (v, label) in &ax.ticks {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(*v),
            f.top + f.height + 20.0,
            label
        );
    }
    for (v, label) in &ay.ticks {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            f.left - 8.0,
            py(*v) + 4.0,
            label
        );
    }
    axis_labels(&mut out, style, &f);

    for (i, (s, pts)) in series.iter().zip(&lines).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="series" data-series="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            s.key(),
            coords.join(" ")
        );
        let ly = f.top + 10.0 + 20.0 * i as f64;
        let lx = f.left + f.width + 15.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            s.key()
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Bits × multiplier heatmap of a grid sweep.
///
/// Error cells use fixed anchors (0 → blue, 1.0 → yellow). THD cells are
/// anchored to the observed dB range, recorded in the `<metadata>` element.
pub fn render_heatmap(result: &SweepResult, style: &ChartStyle, metric: HeatMetric) -> Result<String> {
    // group rows by bit count, preserving row order
    let mut groups: Vec<(u32, Vec<&SweepRow>)> = Vec::new();
    for row in &result.rows {
        let b = row
            .bits()
            .ok_or_else(|| invalid("heatmap rows need a bit count"))?;
        match groups.last_mut() {
            Some((gb, rows)) if *gb == b => rows.push(row),
            _ => groups.push((b, vec![row])),
        }
    }
    if groups.is_empty() {
        return Err(invalid("sweep has no rows"));
    }
    let columns: Vec<_> = groups[0].1.iter().map(|r| r.timing()).collect();
    for (b, rows) in &groups {
        let cols: Vec<_> = rows.iter().map(|r| r.timing()).collect();
        if cols != columns {
            return Err(invalid(format!("grid is ragged at bits = {b}")));
        }
    }
    if groups.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(invalid("grid rows must be ordered by bit count"));
    }

    let value = |row: &SweepRow| match metric {
        HeatMetric::MaxError => Some(row.report.max_abs_error),
        HeatMetric::ThdDb => row_thd_db(row),
    };
    let (low, high) = match metric {
        HeatMetric::MaxError => (0.0, 1.0),
        HeatMetric::ThdDb => result
            .rows
            .iter()
            .filter_map(value)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v))),
    };
    let t_of = |v: f64| {
        if high > low {
            (v - low) / (high - low)
        } else {
            0.0
        }
    };

    let f = Frame {
        left: 80.0,
        top: 50.0,
        width: style.width as f64 - 80.0 - 120.0,
        height: style.height as f64 - 50.0 - 70.0,
    };
    let ncols = columns.len();
    let nrows = groups.len();
    let cw = f.width / ncols as f64;
    let ch = f.height / nrows as f64;

    let mut out = String::new();
    open_svg(&mut out, style);
    let metric_key = match metric {
        HeatMetric::MaxError => "max_err",
        HeatMetric::ThdDb => "thd_db",
    };
    let anchor = |v: f64| {
        if v.is_finite() {
            format_number(v)
        } else {
            String::new()
        }
    };
    let _ = writeln!(
        out,
        r#"<metadata><ramp metric="{metric_key}" low="{}" high="{}" low-color="{}" high-color="{}"/></metadata>"#,
        anchor(low),
        anchor(high),
        hex(BLUE),
        hex(YELLOW)
    );
    let _ = writeln!(
        out,
        r#"<defs><linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0"><stop offset="0" stop-color="{}"/><stop offset="1" stop-color="{}"/></linearGradient></defs>"#,
        hex(BLUE),
        hex(YELLOW)
    );

    let _ = writeln!(out, r#"<g class="cells" shape-rendering="crispEdges">"#);
    for (i, (_, rows)) in groups.iter().enumerate() {
        // lowest bit count at the bottom
        let y = f.top + (nrows - 1 - i) as f64 * ch;
        for (j, row) in rows.iter().enumerate() {
            let fill = value(row).map_or(MISSING.to_owned(), |v| ramp_color(t_of(v)));
            let _ = writeln!(
                out,
                r#"<rect class="cell" x="{:.2}" y="{y:.2}" width="{cw:.2}" height="{ch:.2}" fill="{fill}"/>"#,
                f.left + j as f64 * cw
            );
        }
    }
    let _ = writeln!(out, "</g>");

    // axis labels: every row up to 16 rows, about 8 columns
    let row_every = nrows.div_ceil(16);
    for (i, (b, _)) in groups.iter().enumerate().step_by(row_every) {
        let y = f.top + (nrows - 1 - i) as f64 * ch + ch / 2.0 + 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{y:.2}" text-anchor="end">{b}</text>"#,
            f.left - 8.0
        );
    }
    let col_every = ncols.div_ceil(8);
    for (j, t) in columns.iter().enumerate().step_by(col_every) {
        let label = t.map_or(String::new(), |t| format_number(t.multiplier()));
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            f.left + (j as f64 + 0.5) * cw,
            f.top + f.height + 20.0
        );
    }
    axis_labels(&mut out, style, &f);

    let bx = f.left + f.width + 30.0;
    let _ = writeln!(
        out,
        r##"<rect class="colorbar" x="{bx:.2}" y="{:.2}" width="20" height="{:.2}" fill="url(#ramp)" stroke="#000000"/>"##,
        f.top, f.height
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
        bx + 26.0,
        f.top + 4.0,
        anchor(high)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
        bx + 26.0,
        f.top + f.height + 4.0,
        anchor(low)
    );
    out.push_str("</svg>\n");
    Ok(out)
}
