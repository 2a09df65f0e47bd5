use serde::Serialize;

use crate::metrics::MetricsReport;
use crate::sweep::SCHEMA_VERSION;

/// Flat JSON view of a [`MetricsReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportJson {
    pub model: &'static str,
    pub freq_hz: f64,
    pub bits: Option<u32>,
    pub mode: Option<&'static str>,
    pub m_num: Option<u64>,
    pub m_den: Option<u64>,
    pub max_abs_error: f64,
    pub argmax_time_s: f64,
    pub thd_ratio: Option<f64>,
    pub thd_db: Option<f64>,
    pub paper_bound: f64,
    pub strict_bound: f64,
    pub schema_version: u32,
}

impl From<&MetricsReport> for ReportJson {
    fn from(r: &MetricsReport) -> Self {
        let q = r.model.quantizer();
        let t = r.model.timing();
        ReportJson {
            model: r.model.name(),
            freq_hz: r.model.spec.frequency_hz(),
            bits: q.map(|q| q.bits()),
            mode: q.map(|q| q.mode().as_str()),
            m_num: t.map(|t| t.num()),
            m_den: t.map(|t| t.den()),
            max_abs_error: r.max_abs_error,
            argmax_time_s: r.argmax_time_s,
            thd_ratio: r.thd.map(|t| t.ratio),
            thd_db: r.thd.and_then(|t| t.db),
            paper_bound: r.paper_bound,
            strict_bound: r.strict_bound,
            schema_version: SCHEMA_VERSION,
        }
    }
}

pub fn report_json(report: &MetricsReport) -> String {
    serde_json::to_string_pretty(&ReportJson::from(report)).expect("report serializes")
}
