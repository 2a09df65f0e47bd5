//! Maximum absolute error and THD for a waveform model.

mod probes;
mod spectrum;

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundVariant};
use crate::error::{invalid, Error, Result};
use crate::signal::{ModelKind, WaveformModel};

pub use probes::{max_abs_error, probe_times};
pub use spectrum::{
    dft_len, spectrum_dft, spectrum_dft_capped, spectrum_exact_staircase, thd, Spectrum,
    SpectrumMethod, Thd, DEFAULT_DFT_CAP, EXACT_HARMONICS_PER_CYCLE, MAX_EXACT_STEPS,
    MIN_SAMPLES_PER_STEP,
};

/// Default DFT oversampling for stepped models.
pub const DEFAULT_SAMPLES_PER_STEP: usize = 64;

/// How the sup error is probed over one combined period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// Uniform probes per combined period.
    pub samples_per_period: usize,
    /// Offset before and after each discontinuity, as a fraction of the
    /// combined period.
    pub epsilon_fraction: f64,
    pub probe_discontinuities: bool,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan {
            samples_per_period: 100_000,
            epsilon_fraction: 1e-9,
            probe_discontinuities: true,
        }
    }
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_period < 64 {
            return Err(invalid(format!(
                "samples per period must be >= 64, got {}",
                self.samples_per_period
            )));
        }
        if !(self.epsilon_fraction > 0.0 && self.epsilon_fraction <= 1e-6) {
            return Err(invalid(format!(
                "epsilon fraction must be in (0, 1e-6], got {}",
                self.epsilon_fraction
            )));
        }
        Ok(())
    }
}

/// Single-point metrics with the matching closed-form bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub model: WaveformModel,
    pub max_abs_error: f64,
    pub argmax_time_s: f64,
    /// Absent when the fundamental vanishes or the spectrum was not computed.
    pub thd: Option<Thd>,
    pub paper_bound: f64,
    pub strict_bound: f64,
}

impl MetricsReport {
    /// Error as a percentage of the unit amplitude.
    pub fn max_abs_error_pct(&self) -> f64 {
        100.0 * self.max_abs_error
    }
}

/// `(paper, strict)` worst-case error bounds for a model.
pub fn bounds_for(model: &WaveformModel) -> (f64, f64) {
    match model.kind {
        ModelKind::Target => (0.0, 0.0),
        ModelKind::Quantized(q) => {
            let b = q.lsb();
            (b, b)
        }
        ModelKind::Held(t) => {
            let x = t.cycles_per_step();
            (
                bounds::held_error_bound_at(x, BoundVariant::Paper),
                bounds::held_error_bound_at(x, BoundVariant::Strict),
            )
        }
        ModelKind::Digitized(t, q) => {
            let x = t.cycles_per_step();
            (
                bounds::digitized_error_bound_at(x, q.bits(), BoundVariant::Paper),
                bounds::digitized_error_bound_at(x, q.bits(), BoundVariant::Strict),
            )
        }
    }
}

pub fn evaluate(
    model: &WaveformModel,
    plan: &SamplingPlan,
    samples_per_step: usize,
) -> Result<MetricsReport> {
    evaluate_capped(model, plan, samples_per_step, DEFAULT_DFT_CAP)
}

pub fn evaluate_capped(
    model: &WaveformModel,
    plan: &SamplingPlan,
    samples_per_step: usize,
    dft_cap: usize,
) -> Result<MetricsReport> {
    plan.validate()?;
    let spectrum = spectrum_dft_capped(model, samples_per_step, dft_cap)?;
    let thd = match thd(&spectrum) {
        Ok(t) => Some(t),
        Err(Error::DegenerateSignal) => None,
        Err(e) => return Err(e),
    };
    Ok(error_report(model, plan, thd))
}

/// Report with the time-domain metric and bounds, and a caller-supplied THD.
pub(crate) fn error_report(model: &WaveformModel, plan: &SamplingPlan, thd: Option<Thd>) -> MetricsReport {
    let (max_abs_error, argmax_time_s) = max_abs_error(model, plan);
    let (paper_bound, strict_bound) = bounds_for(model);
    MetricsReport {
        model: *model,
        max_abs_error,
        argmax_time_s,
        thd,
        paper_bound,
        strict_bound,
    }
}
