//! Serialization of reports and sweeps: CSV, JSON and SVG charts.

mod csv;
mod json;
mod svg;

pub use self::csv::{eval_csv, sweep_csv};
pub use self::json::{report_json, ReportJson};
pub use self::svg::{render_heatmap, render_line_chart, ChartKind, ChartStyle, HeatMetric, Series};

/// Locale-independent number text that parses back to the same `f64`.
///
/// Plain decimal for magnitudes in `[1e-4, 1e6)`, otherwise scientific with
/// a lowercase `e`. Both branches use the shortest round-trip digits.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    let a = x.abs();
    if (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
