//! Coherent spectra and total harmonic distortion.
//!
//! Both estimators work on one combined period `q·T`, so bin `n` sits at
//! `n·f/q` and the target frequency is bin `q`. [`spectrum_dft`] samples the
//! model and transforms it; [`spectrum_exact_staircase`] integrates a
//! piecewise-constant model in closed form and serves as its oracle.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::{sin_cycles, Phase};
use crate::signal::WaveformModel;

/// Default ceiling on the DFT length.
pub const DEFAULT_DFT_CAP: usize = 1 << 24;
/// Minimum samples per hold step for the DFT route.
pub const MIN_SAMPLES_PER_STEP: usize = 16;
/// Largest step count accepted by the closed-form route (cost is `O(p²)`).
pub const MAX_EXACT_STEPS: u64 = 8192;
/// Harmonics emitted by the closed-form route per unit of `q`.
pub const EXACT_HARMONICS_PER_CYCLE: u64 = 16384;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumMethod {
    Dft,
    ExactStaircase,
}

/// One-sided peak-amplitude spectrum over a combined period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Bin spacing, `f/q`.
    pub base_frequency_hz: f64,
    /// Bin holding the target frequency, `q`.
    pub fundamental_index: u64,
    pub dc: f64,
    /// Peak amplitude of bin `n` at index `n − 1`.
    pub amplitudes: Vec<f64>,
    /// Mean-square power above the last listed bin (closed form; zero for
    /// the DFT, whose bins are exhaustive below Nyquist).
    pub tail_power: f64,
    pub method: SpectrumMethod,
}

impl Spectrum {
    pub fn amplitude(&self, bin: u64) -> f64 {
        if bin == 0 {
            return self.dc.abs();
        }
        self.amplitudes.get(bin as usize - 1).copied().unwrap_or(0.0)
    }

    /// `(bin, amplitude)` pairs for bins `1..`.
    pub fn bins(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.amplitudes.iter().enumerate().map(|(i, &a)| (i as u64 + 1, a))
    }

    /// `dc² + Σ A_n²/2` over the listed bins.
    pub fn captured_power(&self) -> f64 {
        self.dc * self.dc + self.amplitudes.iter().map(|a| a * a).sum::<f64>() / 2.0
    }

    pub fn total_power(&self) -> f64 {
        self.captured_power() + self.tail_power
    }
}

/// THD as a ratio and, when nonzero, in dB.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thd {
    pub ratio: f64,
    pub db: Option<f64>,
}

impl Thd {
    pub fn from_ratio(ratio: f64) -> Thd {
        let db = (ratio > 0.0).then(|| 20.0 * ratio.log10());
        Thd { ratio, db }
    }
}

/// Root-sum-square of every non-DC, non-fundamental bin (including
/// sub-harmonics and the closed-form tail) relative to the fundamental.
pub fn thd(spectrum: &Spectrum) -> Result<Thd> {
    let fund = spectrum.amplitude(spectrum.fundamental_index);
    if fund == 0.0 || !fund.is_finite() {
        return Err(Error::DegenerateSignal);
    }
    let others: f64 = spectrum
        .bins()
        .filter(|&(n, _)| n != spectrum.fundamental_index)
        .map(|(_, a)| a * a)
        .sum::<f64>()
        + 2.0 * spectrum.tail_power;
    Ok(Thd::from_ratio(others.sqrt() / fund))
}

/// DFT length used for `model` at `samples_per_step` points per hold step.
pub fn dft_len(model: &WaveformModel, samples_per_step: usize) -> u128 {
    match model.timing() {
        Some(t) => t.num() as u128 * samples_per_step as u128,
        None => (1u128 << 18).max(4096 * model.combined_cycles() as u128),
    }
}

pub fn spectrum_dft(model: &WaveformModel, samples_per_step: usize) -> Result<Spectrum> {
    spectrum_dft_capped(model, samples_per_step, DEFAULT_DFT_CAP)
}

/// Coherent, unwindowed DFT of one combined period.
///
/// Stepped models are sampled `samples_per_step` times per step, so every
/// step contributes equally and there is no leakage.
pub fn spectrum_dft_capped(
    model: &WaveformModel,
    samples_per_step: usize,
    cap: usize,
) -> Result<Spectrum> {
    if samples_per_step < MIN_SAMPLES_PER_STEP {
        return Err(crate::error::invalid(format!(
            "samples per step must be >= {MIN_SAMPLES_PER_STEP}, got {samples_per_step}"
        )));
    }
    let size = dft_len(model, samples_per_step);
    if size > cap as u128 {
        let (p, q) = model.timing().map_or((0, 1), |t| (t.num(), t.den()));
        return Err(Error::Resource { p, q, size, cap });
    }
    let n = size as usize;
    let cycles = model.combined_cycles();

    let mut buf: Vec<Complex<f64>> = (0..n as u64)
        .map(|j| Complex::new(model.sample_phase(&Phase::rational(j * cycles, n as u64)), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let norm = n as f64;
    let amplitudes = buf[1..n / 2].iter().map(|x| 2.0 * x.norm() / norm).collect();
    Ok(Spectrum {
        base_frequency_hz: model.spec.frequency_hz() / cycles as f64,
        fundamental_index: cycles,
        dc: buf[0].re / norm,
        amplitudes,
        tail_power: 0.0,
        method: SpectrumMethod::Dft,
    })
}

/// Closed-form Fourier series of a held or digitized model.
///
/// With step values `v_k` on `p` equal steps, the coefficient of bin `n` is
/// `c_n = V_n·(e^{−i2πn/p} − 1)/(−i2πn)` where `V_n = Σ v_k e^{−i2πnk/p}` is
/// periodic in `n`. `V` is summed directly (no FFT) once per residue class,
/// which also gives the power above the last emitted bin in closed form:
/// each residue class `r` contributes `Σ_{n≡r} 1/n²`, a trigamma value.
pub fn spectrum_exact_staircase(model: &WaveformModel) -> Result<Spectrum> {
    let timing = model.timing().ok_or(Error::UnsupportedModel(model.name()))?;
    let (p, q) = (timing.num(), timing.den());
    if p > MAX_EXACT_STEPS {
        return Err(Error::Resource {
            p,
            q,
            size: p as u128 * p as u128,
            cap: (MAX_EXACT_STEPS * MAX_EXACT_STEPS) as usize,
        });
    }
    let values = model.step_values().expect("stepped model");
    let pu = p as usize;

    // twiddle[j] = e^{-i2πj/p}
    let twiddle: Vec<Complex<f64>> = (0..p)
        .map(|j| {
            let x = j as f64 / p as f64;
            Complex::new(sin_cycles(x + 0.25), -sin_cycles(x))
        })
        .collect();
    let residues: Vec<f64> = (0..pu)
        .map(|r| {
            let mut acc = Complex::new(0.0, 0.0);
            let mut idx = 0usize;
            for &v in &values {
                acc += twiddle[idx] * v;
                idx += r;
                if idx >= pu {
                    idx -= pu;
                }
            }
            acc.norm()
        })
        .collect();
    // |sin(πr/p)|
    let aperture: Vec<f64> = (0..p).map(|r| sin_cycles(r as f64 / (2 * p) as f64)).collect();

    let dc = values.iter().sum::<f64>() / p as f64;
    let mean_square = values.iter().map(|v| v * v).sum::<f64>() / p as f64;
    let n_max = EXACT_HARMONICS_PER_CYCLE * q;
    let mut captured = dc * dc;
    let mut amplitudes = Vec::new();
    for n in 1..=n_max {
        let r = (n % p) as usize;
        let a = 2.0 * residues[r] * aperture[r] / (PI * n as f64);
        captured += a * a / 2.0;
        amplitudes.push(a);
        if n >= q && captured >= (1.0 - 1e-10) * mean_square {
            break;
        }
    }

    let last = amplitudes.len() as u64;
    let tail_power = (1..p)
        .map(|r| {
            let first = last + 1 + (r + p - (last + 1) % p) % p;
            let weight = residues[r as usize] * aperture[r as usize];
            2.0 * weight * weight / (PI * PI) * trigamma(first as f64 / p as f64)
                / (p as f64 * p as f64)
        })
        .sum();

    Ok(Spectrum {
        base_frequency_hz: model.spec.frequency_hz() / q as f64,
        fundamental_index: q,
        dc,
        amplitudes,
        tail_power,
        method: SpectrumMethod::ExactStaircase,
    })
}

/// `ψ₁(x) = Σ_{k≥0} 1/(x+k)²` for `x > 0`.
pub(crate) fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 20.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let z = 1.0 / x;
    let z2 = z * z;
    acc + z + z2 / 2.0 + z * z2 * (1.0 / 6.0 - z2 * (1.0 / 30.0 - z2 * (1.0 / 42.0 - z2 / 30.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{SignalSpec, TimingConfig};

    fn held(m: u64) -> WaveformModel {
        WaveformModel::held(SignalSpec::new(1.0).unwrap(), TimingConfig::integer(m).unwrap())
    }

    #[test]
    fn trigamma_reference_values() {
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((trigamma(0.5) - PI * PI / 2.0).abs() < 1e-13);
        // brute-force partial sum plus integral tail
        let x = 2.75;
        let k = 200_000;
        let brute: f64 = (0..k).map(|i| 1.0 / ((x + i as f64) * (x + i as f64))).sum::<f64>()
            + 1.0 / (x + k as f64 - 0.5);
        assert!((trigamma(x) - brute).abs() < 1e-12);
    }

    #[test]
    fn exact_rejects_unstepped_models() {
        let s = SignalSpec::new(1.0).unwrap();
        assert_eq!(
            spectrum_exact_staircase(&WaveformModel::target(s)),
            Err(Error::UnsupportedModel("target"))
        );
    }

    #[test]
    fn dft_cap_names_the_multiplier() {
        let model = WaveformModel::held(
            SignalSpec::new(1.0).unwrap(),
            TimingConfig::new(100_001, 7).unwrap(),
        );
        match spectrum_dft_capped(&model, 64, 1 << 20) {
            Err(Error::Resource { p, q, .. }) => assert_eq!((p, q), (100_001, 7)),
            other => panic!("expected resource error, got {other:?}"),
        }
        assert!(spectrum_dft(&held(8), 8).is_err());
    }

    #[test]
    fn zero_signal_spectrum() {
        let s = spectrum_exact_staircase(&held(2)).unwrap();
        assert_eq!(s.dc, 0.0);
        assert!(s.amplitudes.iter().all(|&a| a == 0.0));
        assert_eq!(s.tail_power, 0.0);
        assert_eq!(thd(&s), Err(Error::DegenerateSignal));
    }

    #[test]
    fn thd_db_absent_for_pure_fundamental() {
        let s = Spectrum {
            base_frequency_hz: 1.0,
            fundamental_index: 1,
            dc: 0.3,
            amplitudes: vec![1.0, 0.0, 0.0],
            tail_power: 0.0,
            method: SpectrumMethod::Dft,
        };
        assert_eq!(thd(&s).unwrap(), Thd { ratio: 0.0, db: None });
    }
}
