//! Error and distortion metrics for direct digital synthesis of a sine.
//!
//! A synthesizer's output is modelled as the ideal unit sine degraded by a
//! finite-resolution DAC ([`QuantizerConfig`]), a finite update rate
//! ([`TimingConfig`]), or both. For each model the crate measures the
//! maximum absolute error against the ideal sine and the total harmonic
//! distortion, compares them with closed-form worst-case bounds, and sweeps
//! both metrics over bit count and frequency multiplier.
//!
//! ```
//! use ddsmetrics_core::{evaluate, SamplingPlan, SignalSpec, TimingConfig, WaveformModel};
//!
//! let model = WaveformModel::held(SignalSpec::new(1.0)?, TimingConfig::integer(8)?);
//! let report = evaluate(&model, &SamplingPlan::default(), 64)?;
//! assert!(report.max_abs_error <= report.paper_bound);
//! # Ok::<(), ddsmetrics_core::Error>(())
//! ```

pub mod bounds;
pub mod error;
pub mod metrics;
mod phase;
pub mod report;
pub mod signal;
pub mod sweep;

pub use bounds::{
    digitized_error_bound, full_scale_range, held_error_bound, held_error_bound_at,
    max_phase_shift, min_clock_frequency, quantization_error_bound, BoundVariant,
};
pub use error::{Error, Result};
pub use metrics::{
    bounds_for, evaluate, evaluate_capped, max_abs_error, probe_times, spectrum_dft,
    spectrum_dft_capped, spectrum_exact_staircase, thd, MetricsReport, SamplingPlan, Spectrum,
    SpectrumMethod, Thd,
};
pub use phase::{sin_cycles, Phase};
pub use signal::{
    digitized_sample, held_sample, quantize_sample, target_sample, ModelKind, QuantizationMode,
    QuantizerConfig, SignalSpec, TimingConfig, WaveformModel, MAX_BITS,
};
pub use sweep::{
    snap_multiplier, sweep_bits, sweep_grid, sweep_multiplier, BitsAxis, MultiplierAxis,
    RowFlags, SweepKind, SweepResult, SweepRow, SweepSpec,
};
