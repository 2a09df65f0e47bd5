//! Parameter sweeps over bit count and frequency multiplier.
//!
//! Sweeps run at `f = 1 Hz`; every metric depends on `f` and `Δt` only
//! through `f·Δt = 1/M`. Log-spaced multipliers are snapped to `p/q` with a
//! bounded denominator so each row can be analysed coherently. Rows are
//! independent and may be evaluated in parallel, but the result is always
//! assembled in parameter order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metrics::{
    self, MetricsReport, SamplingPlan, Thd, DEFAULT_DFT_CAP, DEFAULT_SAMPLES_PER_STEP,
};
use crate::signal::{QuantizationMode, QuantizerConfig, SignalSpec, TimingConfig, WaveformModel, MAX_BITS};

pub const SCHEMA_VERSION: u32 = 1;

/// Best rational approximation `p/q` of `requested` with `q ≤ q_max`.
///
/// Ties go to the smaller denominator, then the smaller numerator.
pub fn snap_multiplier(requested: f64, q_max: u64) -> Result<TimingConfig> {
    if !(requested.is_finite() && requested > 0.0) {
        return Err(invalid(format!("multiplier must be positive, got {requested}")));
    }
    if q_max == 0 {
        return Err(invalid("denominator limit must be >= 1"));
    }
    let mut best: Option<(f64, u64, u64)> = None;
    for q in 1..=q_max {
        let scaled = requested * q as f64;
        let lo = scaled.floor().max(1.0) as u64;
        for p in [lo, lo + 1] {
            let err = (p as f64 / q as f64 - requested).abs();
            if best.is_none_or(|(e, _, _)| err < e) {
                best = Some((err, p, q));
            }
        }
    }
    let (_, p, q) = best.expect("q_max >= 1");
    TimingConfig::new(p, q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitsAxis {
    pub from: u32,
    pub to: u32,
    pub stride: u32,
}

impl BitsAxis {
    pub fn values(&self) -> Vec<u32> {
        (self.from..=self.to).step_by(self.stride.max(1) as usize).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MultiplierAxis {
    /// `10^from ..= 10^to`, log-spaced, endpoints included.
    Decades {
        from: f64,
        to: f64,
        points_per_decade: u32,
    },
    Explicit(Vec<f64>),
}

impl MultiplierAxis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            MultiplierAxis::Decades {
                from,
                to,
                points_per_decade,
            } => {
                let ppd = *points_per_decade as f64;
                let steps = ((to - from) * ppd + 1e-9).floor() as u64;
                (0..=steps)
                    .map(|k| 10f64.powf(from + k as f64 / ppd))
                    .collect()
            }
            MultiplierAxis::Explicit(v) => {
                let mut v = v.clone();
                v.sort_by(f64::total_cmp);
                v
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepKind {
    Bits,
    Multiplier,
    Grid,
}

impl SweepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepKind::Bits => "bits",
            SweepKind::Multiplier => "multiplier",
            SweepKind::Grid => "grid",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub bits: BitsAxis,
    pub multiplier: MultiplierAxis,
    pub mode: QuantizationMode,
    /// Denominator limit for multiplier snapping.
    pub q_max: u64,
    pub plan: SamplingPlan,
    pub samples_per_step: usize,
    pub dft_cap: usize,
    /// Evaluate rows on the rayon pool. Does not affect the output.
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            bits: BitsAxis {
                from: 1,
                to: 16,
                stride: 1,
            },
            multiplier: MultiplierAxis::Decades {
                from: 0.5,
                to: 4.0,
                points_per_decade: 30,
            },
            mode: QuantizationMode::Floor,
            q_max: 16,
            plan: SamplingPlan::default(),
            samples_per_step: DEFAULT_SAMPLES_PER_STEP,
            dft_cap: DEFAULT_DFT_CAP,
            parallel: true,
        }
    }
}

impl SweepSpec {
    fn validate(&self, kind: SweepKind) -> Result<()> {
        self.plan.validate()?;
        if self.samples_per_step < metrics::MIN_SAMPLES_PER_STEP {
            return Err(invalid(format!(
                "samples per step must be >= {}",
                metrics::MIN_SAMPLES_PER_STEP
            )));
        }
        if kind != SweepKind::Multiplier {
            let b = &self.bits;
            if b.from < 1 || b.to > MAX_BITS || b.from > b.to || b.stride == 0 {
                return Err(invalid(format!(
                    "bit range {}..={} step {} must lie within 1..={MAX_BITS}",
                    b.from, b.to, b.stride
                )));
            }
        }
        if kind != SweepKind::Bits {
            if self.q_max == 0 {
                return Err(invalid("denominator limit must be >= 1"));
            }
            match &self.multiplier {
                MultiplierAxis::Decades {
                    from,
                    to,
                    points_per_decade,
                } => {
                    if *points_per_decade == 0 || !(from.is_finite() && to.is_finite()) || from > to {
                        return Err(invalid(format!(
                            "decade range {from}..{to} at {points_per_decade} points per decade is invalid"
                        )));
                    }
                }
                MultiplierAxis::Explicit(v) => {
                    if v.is_empty() || v.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
                        return Err(invalid("multiplier list must be nonempty and positive"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowFlags {
    /// Snapped multiplier below 2.
    pub subnyquist: bool,
    /// THD skipped because the DFT would exceed the size cap.
    pub dft_cap_exceeded: bool,
}

impl RowFlags {
    pub fn is_empty(&self) -> bool {
        !self.subnyquist && !self.dft_cap_exceeded
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m_requested: Option<f64>,
    pub report: MetricsReport,
    pub flags: RowFlags,
}

impl SweepRow {
    pub fn bits(&self) -> Option<u32> {
        self.report.model.quantizer().map(|q| q.bits())
    }

    pub fn timing(&self) -> Option<TimingConfig> {
        self.report.model.timing()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub spec: SweepSpec,
    pub schema_version: u32,
    pub rows: Vec<SweepRow>,
}

fn unit_spec() -> SignalSpec {
    SignalSpec::new(1.0).expect("1 Hz is valid")
}

fn eval_row(spec: &SweepSpec, model: WaveformModel, m_requested: Option<f64>) -> Result<SweepRow> {
    let mut flags = RowFlags {
        subnyquist: model.timing().is_some_and(|t| t.num() < 2 * t.den()),
        dft_cap_exceeded: false,
    };
    let thd = match metrics::spectrum_dft_capped(&model, spec.samples_per_step, spec.dft_cap) {
        Ok(s) => match metrics::thd(&s) {
            Ok(t) => Some(t),
            Err(Error::DegenerateSignal) => None,
            Err(e) => return Err(e),
        },
        Err(Error::Resource { .. }) => {
            flags.dft_cap_exceeded = true;
            None
        }
        Err(e) => return Err(e),
    };
    let report = metrics::error_report(&model, &spec.plan, thd);
    Ok(SweepRow {
        m_requested,
        report,
        flags,
    })
}

fn run(
    kind: SweepKind,
    spec: &SweepSpec,
    jobs: Vec<(WaveformModel, Option<f64>)>,
) -> Result<SweepResult> {
    // indexed collect keeps parameter order regardless of completion order
    let rows: Result<Vec<SweepRow>> = if spec.parallel {
        jobs.into_par_iter()
            .map(|(m, r)| eval_row(spec, m, r))
            .collect()
    } else {
        jobs.into_iter().map(|(m, r)| eval_row(spec, m, r)).collect()
    };
    Ok(SweepResult {
        kind,
        spec: spec.clone(),
        schema_version: SCHEMA_VERSION,
        rows: rows?,
    })
}

fn snapped_axis(spec: &SweepSpec) -> Result<Vec<(f64, TimingConfig)>> {
    spec.multiplier
        .values()
        .into_iter()
        .map(|m| Ok((m, snap_multiplier(m, spec.q_max)?)))
        .collect()
}

/// Quantized model, one row per bit count.
pub fn sweep_bits(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate(SweepKind::Bits)?;
    let jobs = spec
        .bits
        .values()
        .into_iter()
        .map(|b| {
            let q = QuantizerConfig::new(b, spec.mode)?;
            Ok((WaveformModel::quantized(unit_spec(), q), None))
        })
        .collect::<Result<Vec<_>>>()?;
    run(SweepKind::Bits, spec, jobs)
}

/// Held model (unlimited amplitude resolution), one row per multiplier.
pub fn sweep_multiplier(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate(SweepKind::Multiplier)?;
    let jobs = snapped_axis(spec)?
        .into_iter()
        .map(|(m, t)| (WaveformModel::held(unit_spec(), t), Some(m)))
        .collect();
    run(SweepKind::Multiplier, spec, jobs)
}

/// Digitized model over bits × multiplier, bits outer.
pub fn sweep_grid(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate(SweepKind::Grid)?;
    let axis = snapped_axis(spec)?;
    let mut jobs = Vec::new();
    for b in spec.bits.values() {
        let q = QuantizerConfig::new(b, spec.mode)?;
        for &(m, t) in &axis {
            jobs.push((WaveformModel::digitized(unit_spec(), t, q), Some(m)));
        }
    }
    run(SweepKind::Grid, spec, jobs)
}

/// THD in dB for a row, if present.
pub fn row_thd_db(row: &SweepRow) -> Option<f64> {
    row.report.thd.and_then(|t: Thd| t.db)
}
