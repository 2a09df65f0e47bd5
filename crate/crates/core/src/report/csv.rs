//! CSV tables for single reports and sweeps.
//!
//! Lines starting with `#` echo the sweep configuration; the first
//! non-comment line is the header. Fields never contain commas, so no
//! quoting is needed. Absent THD values are empty fields.

use std::fmt::Write;

use crate::metrics::MetricsReport;
use crate::sweep::{MultiplierAxis, RowFlags, SweepKind, SweepResult, SweepRow};

use super::format_number as num;
use super::json::ReportJson;

pub const BITS_HEADER: &str = "bits,mode,max_err,max_err_pct,eq5_bound,thd_ratio,thd_db";
pub const MULTIPLIER_HEADER: &str =
    "m_requested,m_num,m_den,max_err,eq14_bound,strict_bound,thd_ratio,thd_db,flags";
pub const GRID_HEADER: &str =
    "bits,m_requested,m_num,m_den,max_err,eq16_bound,strict_bound,thd_ratio,thd_db,flags";
pub const EVAL_HEADER: &str = "model,freq_hz,bits,mode,m_num,m_den,max_abs_error,argmax_time_s,thd_ratio,thd_db,paper_bound,strict_bound,schema_version";

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn flags(f: &RowFlags) -> String {
    let mut parts = Vec::new();
    if f.subnyquist {
        parts.push("subnyquist");
    }
    if f.dft_cap_exceeded {
        parts.push("dft_cap_exceeded");
    }
    if parts.is_empty() {
        "-".to_owned()
    } else {
        parts.join(";")
    }
}

fn thd_fields(row: &SweepRow) -> (String, String) {
    let thd = row.report.thd;
    (opt(thd.map(|t| t.ratio)), opt(thd.and_then(|t| t.db)))
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let spec = &result.spec;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# ddsmetrics sweep={} schema_version={} freq_hz=1",
        result.kind.as_str(),
        result.schema_version
    );
    let axis = match &spec.multiplier {
        MultiplierAxis::Decades {
            from,
            to,
            points_per_decade,
        } => format!("decades:{}..{}@{}", num(*from), num(*to), points_per_decade),
        MultiplierAxis::Explicit(v) => {
            let list: Vec<String> = v.iter().map(|&m| num(m)).collect();
            format!("list:{}", list.join(";"))
        }
    };
    let _ = match result.kind {
        SweepKind::Bits => writeln!(
            out,
            "# mode={} bits={}..{}/{}",
            spec.mode, spec.bits.from, spec.bits.to, spec.bits.stride
        ),
        SweepKind::Multiplier => writeln!(out, "# multiplier={axis} q_max={}", spec.q_max),
        SweepKind::Grid => writeln!(
            out,
            "# mode={} bits={}..{}/{} multiplier={axis} q_max={}",
            spec.mode, spec.bits.from, spec.bits.to, spec.bits.stride, spec.q_max
        ),
    };
    let _ = writeln!(
        out,
        "# samples_per_period={} epsilon_fraction={} probe_discontinuities={} samples_per_step={} dft_cap={}",
        spec.plan.samples_per_period,
        num(spec.plan.epsilon_fraction),
        spec.plan.probe_discontinuities,
        spec.samples_per_step,
        spec.dft_cap
    );

    let header = match result.kind {
        SweepKind::Bits => BITS_HEADER,
        SweepKind::Multiplier => MULTIPLIER_HEADER,
        SweepKind::Grid => GRID_HEADER,
    };
    out.push_str(header);
    out.push('\n');

    for row in &result.rows {
        let r = &row.report;
        let (ratio, db) = thd_fields(row);
        let timing = row.timing();
        let (m_num, m_den) = timing.map_or((String::new(), String::new()), |t| {
            (t.num().to_string(), t.den().to_string())
        });
        let bits = row.bits().map(|b| b.to_string()).unwrap_or_default();
        let line = match result.kind {
            SweepKind::Bits => format!(
                "{bits},{},{},{},{},{ratio},{db}",
                spec.mode,
                num(r.max_abs_error),
                num(r.max_abs_error_pct()),
                num(r.paper_bound)
            ),
            SweepKind::Multiplier => format!(
                "{},{m_num},{m_den},{},{},{},{ratio},{db},{}",
                opt(row.m_requested),
                num(r.max_abs_error),
                num(r.paper_bound),
                num(r.strict_bound),
                flags(&row.flags)
            ),
            SweepKind::Grid => format!(
                "{bits},{},{m_num},{m_den},{},{},{},{ratio},{db},{}",
                opt(row.m_requested),
                num(r.max_abs_error),
                num(r.paper_bound),
                num(r.strict_bound),
                flags(&row.flags)
            ),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// One-row CSV with the same columns as the JSON report.
pub fn eval_csv(report: &MetricsReport) -> String {
    let j = ReportJson::from(report);
    let fields = [
        j.model.to_owned(),
        num(j.freq_hz),
        j.bits.map(|b| b.to_string()).unwrap_or_default(),
        j.mode.unwrap_or_default().to_owned(),
        j.m_num.map(|v| v.to_string()).unwrap_or_default(),
        j.m_den.map(|v| v.to_string()).unwrap_or_default(),
        num(j.max_abs_error),
        num(j.argmax_time_s),
        opt(j.thd_ratio),
        opt(j.thd_db),
        num(j.paper_bound),
        num(j.strict_bound),
        j.schema_version.to_string(),
    ];
    format!("{EVAL_HEADER}\n{}\n", fields.join(","))
}
