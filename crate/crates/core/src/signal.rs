//! Sample evaluators for the ideal sine and its degraded variants.
//!
//! All models share unit amplitude and zero phase. The degraded variants are
//!
//! * quantized: `Q(sin(2πft))`, amplitude snapped to one of `2^(B-1)` levels
//!   per unit by floor, round-half-up or ceiling,
//! * held: `sin(2πf·⌊t/Δt⌋·Δt)`, a zero-order hold with update gap `Δt`,
//! * digitized: quantizer applied to the held value.
//!
//! The update gap is never stored as a float. [`TimingConfig`] keeps the
//! frequency multiplier `M = T/Δt = p/q` in lowest terms, so step indices
//! and the combined period `q·T` are exact.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::phase::{sin_cycles, Phase};

/// Largest supported bit count; `2^(B-1)` and every level stay exact in `f64`.
pub const MAX_BITS: u32 = 52;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    frequency_hz: f64,
}

impl SignalSpec {
    pub fn new(frequency_hz: f64) -> Result<Self> {
        if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
            return Err(invalid(format!(
                "frequency must be positive and finite, got {frequency_hz}"
            )));
        }
        Ok(SignalSpec { frequency_hz })
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn period_s(&self) -> f64 {
        1.0 / self.frequency_hz
    }

    fn phase_at(&self, t: f64) -> Result<Phase> {
        if !t.is_finite() || t < 0.0 {
            return Err(invalid(format!("time must be finite and >= 0, got {t}")));
        }
        Ok(Phase::from_time(self.frequency_hz, t))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantizationMode {
    #[default]
    Floor,
    Round,
    Ceiling,
}

impl QuantizationMode {
    pub const ALL: [QuantizationMode; 3] = [Self::Floor, Self::Round, Self::Ceiling];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Floor => "floor",
            Self::Round => "round",
            Self::Ceiling => "ceiling",
        }
    }
}

impl fmt::Display for QuantizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuantizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "floor" => Ok(Self::Floor),
            "round" => Ok(Self::Round),
            "ceiling" | "ceil" => Ok(Self::Ceiling),
            _ => Err(invalid(format!("unknown quantization mode '{s}'"))),
        }
    }
}

/// DAC resolution and level-selection rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantizerConfig {
    bits: u32,
    mode: QuantizationMode,
}

impl QuantizerConfig {
    pub fn new(bits: u32, mode: QuantizationMode) -> Result<Self> {
        if !(1..=MAX_BITS).contains(&bits) {
            return Err(invalid(format!(
                "bit count must be in 1..={MAX_BITS}, got {bits}"
            )));
        }
        Ok(QuantizerConfig { bits, mode })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mode(&self) -> QuantizationMode {
        self.mode
    }

    /// Levels per unit amplitude, `2^(B-1)`.
    pub fn scale(&self) -> f64 {
        (1u64 << (self.bits - 1)) as f64
    }

    /// Width of one level, `2^-(B-1)`.
    pub fn lsb(&self) -> f64 {
        1.0 / self.scale()
    }

    /// Quantize a value already known to lie in `[-1, 1]`.
    pub(crate) fn apply(&self, x: f64) -> f64 {
        let scale = self.scale();
        let y = x * scale;
        let level = match self.mode {
            QuantizationMode::Floor => y.floor(),
            // ⌊y + 1/2⌋ without the rounding of y + 0.5
            QuantizationMode::Round => {
                let f = y.floor();
                if y - f >= 0.5 {
                    f + 1.0
                } else {
                    f
                }
            }
            QuantizationMode::Ceiling => y.ceil(),
        };
        level / scale + 0.0
    }
}

/// Update rate of the hold stage as the exact frequency multiplier
/// `M = p/q = T/Δt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimingConfig {
    num: u64,
    den: u64,
}

impl TimingConfig {
    /// Multiplier `num/den`, reduced to lowest terms.
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(invalid(format!(
                "multiplier terms must be >= 1, got {num}/{den}"
            )));
        }
        let g = num.gcd(&den);
        Ok(TimingConfig {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(m: u64) -> Result<Self> {
        Self::new(m, 1)
    }

    /// Steps per combined period.
    pub fn num(&self) -> u64 {
        self.num
    }

    /// Target cycles per combined period.
    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn multiplier(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Fraction of a target period covered by one step, `f·Δt = q/p`.
    pub fn cycles_per_step(&self) -> f64 {
        self.den as f64 / self.num as f64
    }

    pub fn time_gap_s(&self, spec: &SignalSpec) -> f64 {
        self.den as f64 / (self.num as f64 * spec.frequency_hz)
    }

    /// Held sine value on step `k`: `sin(2π·k·q/p)` with the phase reduced
    /// exactly as `(k·q mod p)/p`.
    pub(crate) fn step_value(&self, k: i128) -> f64 {
        let p = self.num as i128;
        let r = (k * self.den as i128).rem_euclid(p);
        sin_cycles(r as f64 / p as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelKind {
    Target,
    Quantized(QuantizerConfig),
    Held(TimingConfig),
    Digitized(TimingConfig, QuantizerConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveformModel {
    pub spec: SignalSpec,
    pub kind: ModelKind,
}

impl WaveformModel {
    pub fn target(spec: SignalSpec) -> Self {
        WaveformModel {
            spec,
            kind: ModelKind::Target,
        }
    }

    pub fn quantized(spec: SignalSpec, q: QuantizerConfig) -> Self {
        WaveformModel {
            spec,
            kind: ModelKind::Quantized(q),
        }
    }

    pub fn held(spec: SignalSpec, timing: TimingConfig) -> Self {
        WaveformModel {
            spec,
            kind: ModelKind::Held(timing),
        }
    }

    pub fn digitized(spec: SignalSpec, timing: TimingConfig, q: QuantizerConfig) -> Self {
        WaveformModel {
            spec,
            kind: ModelKind::Digitized(timing, q),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModelKind::Target => "target",
            ModelKind::Quantized(_) => "quantized",
            ModelKind::Held(_) => "held",
            ModelKind::Digitized(..) => "digitized",
        }
    }

    pub fn timing(&self) -> Option<TimingConfig> {
        match self.kind {
            ModelKind::Held(t) | ModelKind::Digitized(t, _) => Some(t),
            _ => None,
        }
    }

    pub fn quantizer(&self) -> Option<QuantizerConfig> {
        match self.kind {
            ModelKind::Quantized(q) | ModelKind::Digitized(_, q) => Some(q),
            _ => None,
        }
    }

    /// Target cycles in one combined period (`q` for stepped models, else 1).
    pub fn combined_cycles(&self) -> u64 {
        self.timing().map_or(1, |t| t.den())
    }

    pub fn combined_period_s(&self) -> f64 {
        self.combined_cycles() as f64 / self.spec.frequency_hz
    }

    /// Evaluate at an exact phase.
    pub fn sample_phase(&self, phase: &Phase) -> f64 {
        match self.kind {
            ModelKind::Target => sin_cycles(phase.fraction()),
            ModelKind::Quantized(q) => q.apply(sin_cycles(phase.fraction())),
            ModelKind::Held(t) => t.step_value(phase.step_index(t.num(), t.den())),
            ModelKind::Digitized(t, q) => {
                q.apply(t.step_value(phase.step_index(t.num(), t.den())))
            }
        }
    }

    /// Evaluate at time `t` seconds.
    pub fn sample(&self, t: f64) -> Result<f64> {
        Ok(self.sample_phase(&self.spec.phase_at(t)?))
    }

    /// Values on the `p` steps of one combined period, for stepped models.
    pub fn step_values(&self) -> Option<Vec<f64>> {
        let timing = self.timing()?;
        let held = (0..timing.num() as i128).map(|k| timing.step_value(k));
        Some(match self.quantizer() {
            Some(q) => held.map(|v| q.apply(v)).collect(),
            None => held.collect(),
        })
    }
}

/// Ideal unit sine `sin(2πft)`.
pub fn target_sample(spec: &SignalSpec, t: f64) -> Result<f64> {
    WaveformModel::target(*spec).sample(t)
}

/// Snap an amplitude in `[-1, 1]` to the quantizer grid.
///
/// The level formulas are applied literally: no clamping to a signed code
/// range, so `1.0` maps to `1.0`, and round ties go toward `+∞`.
pub fn quantize_sample(x: f64, q: &QuantizerConfig) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(x));
    }
    Ok(q.apply(x))
}

/// Zero-order-held sine `sin(2πf·⌊t/Δt⌋·Δt)`.
pub fn held_sample(spec: &SignalSpec, timing: &TimingConfig, t: f64) -> Result<f64> {
    WaveformModel::held(*spec, *timing).sample(t)
}

/// Quantized zero-order-held sine.
pub fn digitized_sample(
    spec: &SignalSpec,
    timing: &TimingConfig,
    q: &QuantizerConfig,
    t: f64,
) -> Result<f64> {
    WaveformModel::digitized(*spec, *timing, *q).sample(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use QuantizationMode::*;

    fn spec(f: f64) -> SignalSpec {
        SignalSpec::new(f).unwrap()
    }

    fn qc(bits: u32, mode: QuantizationMode) -> QuantizerConfig {
        QuantizerConfig::new(bits, mode).unwrap()
    }

    fn m(p: u64, q: u64) -> TimingConfig {
        TimingConfig::new(p, q).unwrap()
    }

    #[test]
    fn target_examples() {
        assert_eq!(target_sample(&spec(1.0), 0.0).unwrap(), 0.0);
        assert_eq!(target_sample(&spec(1.0), 0.25).unwrap(), 1.0);
        assert_eq!(target_sample(&spec(50.0), 0.005).unwrap(), 1.0);
    }

    #[test]
    fn target_rejects_bad_time() {
        assert!(target_sample(&spec(1.0), f64::NAN).is_err());
        assert!(target_sample(&spec(1.0), f64::INFINITY).is_err());
        assert!(target_sample(&spec(1.0), -1.0).is_err());
    }

    #[test]
    fn target_keeps_precision_at_large_t() {
        // 1e9 + 0.25 cycles is exactly representable; naive 2πft loses ~1e-7
        let v = target_sample(&spec(1.0), 1.0e9 + 0.25).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn spec_validation() {
        assert!(SignalSpec::new(0.0).is_err());
        assert!(SignalSpec::new(-1.0).is_err());
        assert!(SignalSpec::new(f64::NAN).is_err());
        assert!(QuantizerConfig::new(0, Floor).is_err());
        assert!(QuantizerConfig::new(53, Floor).is_err());
        assert_eq!(qc(52, Floor).scale(), 2f64.powi(51));
        assert!(TimingConfig::new(0, 1).is_err());
        assert_eq!(m(8, 4), m(2, 1));
        assert_eq!(m(8, 4).num(), 2);
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize_sample(0.7, &qc(3, Floor)).unwrap(), 0.5);
        assert_eq!(quantize_sample(0.7, &qc(3, Round)).unwrap(), 0.75);
        assert_eq!(quantize_sample(-0.7, &qc(3, Ceiling)).unwrap(), -0.5);
        assert_eq!(quantize_sample(0.5, &qc(2, Floor)).unwrap(), 0.5);
        assert_eq!(quantize_sample(0.0, &qc(8, Round)).unwrap(), 0.0);
    }

    #[test]
    fn quantize_domain_errors() {
        assert_eq!(
            quantize_sample(1.5, &qc(4, Floor)),
            Err(Error::Domain(1.5))
        );
        assert!(quantize_sample(-1.0000001, &qc(4, Round)).is_err());
        assert!(quantize_sample(f64::NAN, &qc(4, Round)).is_err());
    }

    #[test]
    fn positive_rail_is_not_clamped() {
        for mode in QuantizationMode::ALL {
            assert_eq!(quantize_sample(1.0, &qc(8, mode)).unwrap(), 1.0);
            assert_eq!(quantize_sample(-1.0, &qc(8, mode)).unwrap(), -1.0);
        }
    }

    #[test]
    fn round_ties_go_up() {
        // y = -1.5 → -1, y = 2.5 → 3
        assert_eq!(quantize_sample(-0.375, &qc(3, Round)).unwrap(), -0.25);
        assert_eq!(quantize_sample(0.625, &qc(3, Round)).unwrap(), 0.75);
        // largest double below 1/2 at B = 1 must not round up
        let below_half = 0.5f64.next_down();
        assert_eq!(quantize_sample(below_half, &qc(1, Round)).unwrap(), 0.0);
    }

    #[test]
    fn held_examples() {
        assert_eq!(held_sample(&spec(1.0), &m(4, 1), 0.3).unwrap(), 1.0);
        assert_eq!(held_sample(&spec(1.0), &m(4, 1), 0.999).unwrap(), -1.0);
        for t in [0.0, 0.1, 0.25, 0.5, 0.77, 3.3, 1e6 + 0.4] {
            assert_eq!(held_sample(&spec(1.0), &m(2, 1), t).unwrap(), 0.0);
        }
    }

    #[test]
    fn digitized_examples() {
        let v = digitized_sample(&spec(1.0), &m(8, 1), &qc(2, Floor), 0.2).unwrap();
        assert_eq!(v, 0.5);
        let v = digitized_sample(&spec(1.0), &m(4, 1), &qc(8, Floor), 0.3).unwrap();
        assert_eq!(v, 1.0);
        let v = digitized_sample(&spec(1.0), &m(2, 1), &qc(5, Floor), 0.7).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn held_rational_multiplier() {
        // M = 5/2 at f = 2 Hz: Δt = 0.2 s, step k holds sin(2π·2k/5)
        let s = spec(2.0);
        let t = m(5, 2);
        assert_eq!(t.time_gap_s(&s), 0.2);
        let v = held_sample(&s, &t, 0.45).unwrap();
        assert_eq!(v, sin_cycles(4.0 / 5.0));
    }

    fn mode_strategy() -> impl Strategy<Value = QuantizationMode> {
        prop_oneof![Just(Floor), Just(Round), Just(Ceiling)]
    }

    proptest! {
        #[test]
        fn quantize_is_idempotent(x in -1.0f64..=1.0, bits in 1u32..=52, mode in mode_strategy()) {
            let q = qc(bits, mode);
            let once = quantize_sample(x, &q).unwrap();
            prop_assert_eq!(quantize_sample(once, &q).unwrap(), once);
        }

        #[test]
        fn quantize_mode_ordering(x in -1.0f64..=1.0, bits in 1u32..=52) {
            let f = quantize_sample(x, &qc(bits, Floor)).unwrap();
            let r = quantize_sample(x, &qc(bits, Round)).unwrap();
            let c = quantize_sample(x, &qc(bits, Ceiling)).unwrap();
            prop_assert!(f <= r && r <= c);
        }

        #[test]
        fn quantize_error_within_one_level(x in -1.0f64..=1.0, bits in 1u32..=52, mode in mode_strategy()) {
            let q = qc(bits, mode);
            let y = quantize_sample(x, &q).unwrap();
            prop_assert!((y - x).abs() < q.lsb());
            prop_assert!((-1.0..=1.0).contains(&y));
            // exact multiple of the level width
            prop_assert_eq!((y * q.scale()).fract(), 0.0);
            if mode == Round {
                prop_assert!((y - x).abs() <= q.lsb() / 2.0);
            }
        }

        #[test]
        fn stepped_models_constant_within_a_step(
            p in 1u64..200, q in 1u64..8, k in 0u64..400,
            fracs in proptest::collection::vec(0.0f64..1.0, 8),
            bits in 1u32..16, mode in mode_strategy(),
        ) {
            let timing = m(p, q);
            let quant = qc(bits, mode);
            let held = WaveformModel::held(spec(1.0), timing);
            let dig = WaveformModel::digitized(spec(1.0), timing, quant);
            let start = Phase::rational(k * timing.den(), timing.num());
            let step = timing.cycles_per_step();
            let h0 = held.sample_phase(&start);
            let d0 = dig.sample_phase(&start);
            for u in fracs {
                let ph = start.offset(u * step * (1.0 - 1e-9));
                prop_assert_eq!(held.sample_phase(&ph), h0);
                prop_assert_eq!(dig.sample_phase(&ph), d0);
            }
        }

        #[test]
        fn digitized_is_quantized_hold(
            f in 0.1f64..1000.0, p in 1u64..500, q in 1u64..16, t in 0.0f64..100.0,
            bits in 1u32..=52, mode in mode_strategy(),
        ) {
            let s = spec(f);
            let timing = m(p, q);
            let quant = qc(bits, mode);
            let h = held_sample(&s, &timing, t).unwrap();
            let d = digitized_sample(&s, &timing, &quant, t).unwrap();
            prop_assert_eq!(d.to_bits(), quantize_sample(h, &quant).unwrap().to_bits());
        }

        #[test]
        fn models_repeat_over_combined_period(
            p in 1u64..300, q in 1u64..16, num in 0u64..100_000, den in 1u64..10_000,
            off in -1e-6f64..1e-6, bits in 1u32..20, mode in mode_strategy(),
        ) {
            let timing = m(p, q);
            let s = spec(1.0);
            let models = [
                WaveformModel::target(s),
                WaveformModel::quantized(s, qc(bits, mode)),
                WaveformModel::held(s, timing),
                WaveformModel::digitized(s, timing, qc(bits, mode)),
            ];
            let ph = Phase::rational(num, den).offset(off.abs());
            for model in models {
                let period = model.combined_cycles();
                let a = model.sample_phase(&ph);
                let b = model.sample_phase(&ph.add_cycles(period));
                prop_assert_eq!(a.to_bits(), b.to_bits(), "{}", model.name());
                prop_assert!((-1.0..=1.0).contains(&a));
            }
        }

        #[test]
        fn float_time_periodicity(p in 3u64..100, t in 0.0f64..10.0) {
            // float t and t + T agree except within rounding of a boundary,
            // which random draws essentially never hit
            let s = spec(1.0);
            let timing = m(p, 1);
            let a = held_sample(&s, &timing, t).unwrap();
            let b = held_sample(&s, &timing, t + 1.0).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
