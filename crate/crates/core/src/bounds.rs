//! Closed-form worst-case error bounds.
//!
//! Each hold-related bound comes in two readings. [`BoundVariant::Paper`] is
//! the small-gap estimate `sin(2πf·Δt)` (and its combination with one level
//! of quantization error) as usually quoted. It is exact for even integer
//! multipliers but is exceeded for odd ones, where a step can straddle the
//! steepest part of the sine asymmetrically. [`BoundVariant::Strict`] uses
//! `max_θ |sin(θ + δ) − sin θ| = 2·sin(δ/2)` and dominates every step
//! alignment.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::signal::MAX_BITS;

/// Largest possible distance between two points of a unit sine.
pub const ERROR_CAP: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundVariant {
    /// Closed-form estimates evaluated as written. Not a true bound for odd
    /// multipliers.
    Paper,
    /// Suprema over every step alignment.
    Strict,
}

fn check_bits(bits: u32) -> Result<()> {
    if (1..=MAX_BITS).contains(&bits) {
        Ok(())
    } else {
        Err(invalid(format!(
            "bit count must be in 1..={MAX_BITS}, got {bits}"
        )))
    }
}

/// One quantization level, `2^-(B-1)`.
pub fn quantization_error_bound(bits: u32) -> Result<f64> {
    check_bits(bits)?;
    Ok(1.0 / (1u64 << (bits - 1)) as f64)
}

/// Peak-to-peak span of the unit sine.
pub fn full_scale_range() -> f64 {
    (PI / 2.0).sin() - (-PI / 2.0).sin()
}

/// Lowest clock that can deliver an update every `dt` seconds.
pub fn min_clock_frequency(dt: f64) -> Result<f64> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid(format!("time gap must be positive, got {dt}")));
    }
    Ok(1.0 / dt)
}

/// Phase advance of the target across one hold step, `2πf·Δt` radians.
pub fn max_phase_shift(freq: f64, dt: f64) -> Result<f64> {
    if !(freq.is_finite() && freq > 0.0) {
        return Err(invalid(format!("frequency must be positive, got {freq}")));
    }
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(invalid(format!("time gap must be >= 0, got {dt}")));
    }
    Ok(TAU * freq * dt)
}

fn check_hold(freq: f64, dt: f64) -> Result<()> {
    if !(freq.is_finite() && freq > 0.0) {
        return Err(invalid(format!("frequency must be positive, got {freq}")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid(format!("time gap must be positive, got {dt}")));
    }
    Ok(())
}

/// Hold error bound for a step covering `f·Δt` cycles of the target.
pub fn held_error_bound(freq: f64, dt: f64, variant: BoundVariant) -> Result<f64> {
    check_hold(freq, dt)?;
    Ok(held_error_bound_at(freq * dt, variant))
}

/// [`held_error_bound`] keyed on `f·Δt` directly, for callers that hold it
/// exactly (e.g. `q/p` from a [`TimingConfig`](crate::TimingConfig)).
pub fn held_error_bound_at(cycles_per_step: f64, variant: BoundVariant) -> f64 {
    let x = cycles_per_step;
    match variant {
        BoundVariant::Paper if x <= 0.25 => (TAU * x).sin(),
        BoundVariant::Strict if x <= 0.5 => (2.0 * (PI * x).sin()).min(ERROR_CAP),
        _ => ERROR_CAP,
    }
}

/// Combined quantization and hold bound.
///
/// `Paper` is `(1 + |2^(B-1)·sin(2πf·Δt)|) / 2^(B-1)`, evaluated as
/// written. `Strict` adds one level to the strict hold bound.
pub fn digitized_error_bound(freq: f64, dt: f64, bits: u32, variant: BoundVariant) -> Result<f64> {
    check_hold(freq, dt)?;
    check_bits(bits)?;
    Ok(digitized_error_bound_at(freq * dt, bits, variant))
}

pub(crate) fn digitized_error_bound_at(cycles_per_step: f64, bits: u32, variant: BoundVariant) -> f64 {
    let scale = (1u64 << (bits - 1)) as f64;
    match variant {
        BoundVariant::Paper => (1.0 + (scale * (TAU * cycles_per_step).sin()).abs()) / scale,
        BoundVariant::Strict => 1.0 / scale + held_error_bound_at(cycles_per_step, variant),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use BoundVariant::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn quantization_bound_values() {
        assert_eq!(quantization_error_bound(8).unwrap(), 0.0078125);
        assert_eq!(quantization_error_bound(1).unwrap(), 1.0);
        assert_eq!(quantization_error_bound(12).unwrap(), 4.8828125e-4);
        assert!(quantization_error_bound(0).is_err());
        assert!(quantization_error_bound(53).is_err());
        for b in 1..MAX_BITS {
            assert_eq!(
                quantization_error_bound(b + 1).unwrap(),
                quantization_error_bound(b).unwrap() / 2.0
            );
        }
    }

    #[test]
    fn full_scale() {
        assert_eq!(full_scale_range(), 2.0);
        assert_eq!(full_scale_range() / 2.0, 1.0);
        assert_eq!(full_scale_range(), quantization_error_bound(1).unwrap() * 2.0);
    }

    #[test]
    fn clock_and_phase() {
        assert_eq!(min_clock_frequency(1e-6).unwrap(), 1e6);
        assert_eq!(min_clock_frequency(0.25).unwrap(), 4.0);
        assert_eq!(min_clock_frequency(0.5).unwrap(), 2.0);
        assert!(min_clock_frequency(0.0).is_err());
        assert!(min_clock_frequency(-1.0).is_err());

        assert!(close(max_phase_shift(1.0, 0.25).unwrap(), PI / 2.0, 1e-15));
        assert!(close(max_phase_shift(3.0, 1.0 / 6.0).unwrap(), PI, 1e-15));
        assert_eq!(max_phase_shift(1.0, 0.0).unwrap(), 0.0);
        assert!(max_phase_shift(1.0, -0.1).is_err());
    }

    #[test]
    fn held_bound_values() {
        assert!(close(held_error_bound(1.0, 0.01, Paper).unwrap(), 0.0627905, 5e-8));
        assert_eq!(held_error_bound(1.0, 0.5, Paper).unwrap(), 2.0);
        assert!(close(held_error_bound(1.0, 0.2, Strict).unwrap(), 1.1755705, 5e-8));
        let ratio = held_error_bound(1.0, 0.01, Strict).unwrap()
            / held_error_bound(1.0, 0.01, Paper).unwrap();
        assert!(close(ratio, 1.0 / (PI * 0.01).cos(), 1e-14));
        assert!(close(ratio, 1.000493, 1e-6));
        assert!(held_error_bound(0.0, 0.1, Paper).is_err());
        assert!(held_error_bound(1.0, 0.0, Strict).is_err());
    }

    #[test]
    fn held_bound_branch_edges() {
        assert_eq!(held_error_bound_at(0.25, Paper), 1.0);
        assert_eq!(held_error_bound_at(0.2500001, Paper), 2.0);
        assert_eq!(held_error_bound_at(0.5, Strict), 2.0);
        assert_eq!(held_error_bound_at(0.75, Strict), 2.0);
    }

    #[test]
    fn digitized_bound_values() {
        let paper = digitized_error_bound(1.0, 1.0 / 64.0, 8, Paper).unwrap();
        assert!(close(paper, 0.1058296, 1e-7));
        // 1/128 + 2 sin(π/64)
        let strict = digitized_error_bound(1.0, 1.0 / 64.0, 8, Strict).unwrap();
        assert!(close(strict, 0.1059478, 1e-7));
        for b in [1, 4, 8, 16, 52] {
            let tiny = digitized_error_bound(1.0, 1e-18, b, Paper).unwrap();
            assert!(close(tiny, quantization_error_bound(b).unwrap(), 1e-15));
        }
        assert!(digitized_error_bound(1.0, 0.1, 0, Paper).is_err());
    }

    proptest! {
        #[test]
        fn held_bounds_capped_and_ordered(x in 1e-9f64..3.0) {
            let p = held_error_bound_at(x, Paper);
            let s = held_error_bound_at(x, Strict);
            prop_assert!(p <= ERROR_CAP && s <= ERROR_CAP);
            prop_assert!(p >= 0.0 && s >= 0.0);
            if x <= 0.25 {
                prop_assert!((s / p - 1.0 / (PI * x).cos()).abs() < 1e-9);
            }
        }

        #[test]
        fn strict_to_paper_ratio_falls_with_multiplier(m in 4.0f64..1e6) {
            let r = |m: f64| held_error_bound_at(1.0 / m, Strict) / held_error_bound_at(1.0 / m, Paper);
            prop_assert!(r(m * 1.01) <= r(m));
            prop_assert!(r(m) >= 1.0);
        }

        #[test]
        fn paper_digitized_dominates_quantization(
            f in 1e-3f64..1e3, dt in 1e-9f64..10.0, bits in 1u32..=52
        ) {
            let d = digitized_error_bound(f, dt, bits, Paper).unwrap();
            prop_assert!(d >= quantization_error_bound(bits).unwrap());
        }
    }
}
