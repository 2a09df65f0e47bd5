//! Sup-error estimation by targeted probing.
//!
//! The error `|model(t) − sin(2πft)|` is piecewise smooth. Its suprema sit
//! one-sided at the jumps: step ends for the hold models and amplitude
//! thresholds for the quantizer. Probing `ε` either side of every jump makes
//! the estimate nearly independent of the uniform grid density.

use crate::phase::{sin_cycles, Phase};
use crate::signal::{ModelKind, QuantizationMode, QuantizerConfig, WaveformModel};

use super::SamplingPlan;

/// Thresholds per half-range beyond which only the ones nearest zero are
/// probed; full enumeration would need 2^51 crossings at B = 52.
const MAX_THRESHOLDS: u64 = 1 << 16;

pub(crate) fn probe_phases(model: &WaveformModel, plan: &SamplingPlan) -> Vec<Phase> {
    let cycles = model.combined_cycles();
    let n = plan.samples_per_period as u64;
    let eps = plan.epsilon_fraction * cycles as f64;

    let mut probes: Vec<Phase> = (0..n).map(|j| Phase::rational(j * cycles, n)).collect();

    if plan.probe_discontinuities {
        match model.kind {
            ModelKind::Target => {}
            ModelKind::Held(t) | ModelKind::Digitized(t, _) => {
                let (p, q) = (t.num(), t.den());
                probes.reserve(2 * p as usize);
                for k in 0..p {
                    probes.push(Phase::rational(k * q, p));
                    probes.push(Phase::rational((k + 1) * q, p).offset(-eps));
                }
            }
            ModelKind::Quantized(qc) => {
                for a in crossing_phases(&qc) {
                    for x in [a - eps, a + eps] {
                        let x = if x < 0.0 {
                            x + 1.0
                        } else if x >= 1.0 {
                            x - 1.0
                        } else {
                            x
                        };
                        probes.push(Phase::rational(0, 1).offset(x));
                    }
                }
            }
        }
    }

    probes.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.total_cmp(&kb.0).then_with(|| (ka.1, ka.2, ka.3, ka.4).cmp(&(kb.1, kb.2, kb.3, kb.4)))
    });
    probes.dedup();
    probes
}

/// Phases in `[0, 1)` where `sin(2πt)` crosses a jump threshold of the
/// quantizer. Floor and ceiling jump at the levels `j/2^(B-1)`, round at the
/// half-levels.
fn crossing_phases(qc: &QuantizerConfig) -> Vec<f64> {
    let scale = qc.scale();
    let half_steps = scale as u64;
    let shift = match qc.mode() {
        QuantizationMode::Round => 0.5,
        QuantizationMode::Floor | QuantizationMode::Ceiling => 0.0,
    };
    let mut out = Vec::new();
    for j in 0..=half_steps.min(MAX_THRESHOLDS) {
        let level = (j as f64 + shift) / scale;
        if level > 1.0 {
            break;
        }
        let a = level.asin() / std::f64::consts::TAU;
        out.extend([a, 0.5 - a, 0.5 + a, 1.0 - a]);
    }
    out.iter_mut().for_each(|x| {
        if *x >= 1.0 {
            *x -= 1.0
        }
    });
    out
}

/// Probe times in seconds over one combined period, sorted and deduplicated.
pub fn probe_times(model: &WaveformModel, plan: &SamplingPlan) -> Vec<f64> {
    let f = model.spec.frequency_hz();
    probe_phases(model, plan)
        .iter()
        .map(|p| p.cycles() / f)
        .collect()
}

/// Largest observed `|model − target|` over the probe set and the first
/// probe time attaining it.
pub fn max_abs_error(model: &WaveformModel, plan: &SamplingPlan) -> (f64, f64) {
    let mut best = 0.0;
    let mut at = Phase::rational(0, 1);
    for ph in probe_phases(model, plan) {
        let err = (model.sample_phase(&ph) - sin_cycles(ph.fraction())).abs();
        if err > best {
            best = err;
            at = ph;
        }
    }
    (best, at.cycles() / model.spec.frequency_hz())
}
