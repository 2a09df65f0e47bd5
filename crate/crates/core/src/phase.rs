//! Phase bookkeeping in units of target cycles.
//!
//! Probe times that sit a hair before a step boundary or a level crossing
//! must keep their exact position relative to that boundary. A [`Phase`] is
//! an exact rational anchor `num/den` plus a small floating-point offset held
//! as an unevaluated sum `hi + lo`, which keeps step classification exact
//! for grid-generated probes and for anything derived from an `f64` time.

use num_integer::Integer;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phase {
    num: u64,
    den: u64,
    off_hi: f64,
    off_lo: f64,
}

impl Phase {
    /// Exact rational phase `num / den` cycles. `den` must be nonzero.
    pub fn rational(num: u64, den: u64) -> Phase {
        assert!(den > 0, "phase denominator must be nonzero");
        let g = num.gcd(&den);
        Phase {
            num: num / g,
            den: den / g,
            off_hi: 0.0,
            off_lo: 0.0,
        }
    }

    /// Phase of a sine at `freq` Hz after `t` seconds, with the product
    /// `freq * t` carried to double-double precision.
    pub fn from_time(freq: f64, t: f64) -> Phase {
        let (hi, lo) = two_prod(freq, t);
        let whole = hi.floor();
        Phase {
            num: whole as u64,
            den: 1,
            off_hi: hi - whole,
            off_lo: lo,
        }
    }

    /// Shift by `offset` cycles.
    pub fn offset(self, offset: f64) -> Phase {
        let (hi, lo) = dd_add(self.off_hi, self.off_lo, offset);
        Phase {
            off_hi: hi,
            off_lo: lo,
            ..self
        }
    }

    /// Shift by a whole number of cycles, exactly.
    pub fn add_cycles(self, cycles: u64) -> Phase {
        Phase {
            num: self.num + cycles * self.den,
            ..self
        }
    }

    /// Approximate position in cycles.
    pub fn cycles(&self) -> f64 {
        self.num as f64 / self.den as f64 + self.off_hi + self.off_lo
    }

    /// Position within the current cycle, in `[0, 1)`.
    pub fn fraction(&self) -> f64 {
        let base = (self.num % self.den) as f64 / self.den as f64;
        let x = base + self.off_hi + self.off_lo;
        let r = x - x.floor();
        if r >= 1.0 {
            0.0
        } else {
            r
        }
    }

    /// Index `k` of the hold step containing this phase for a step grid of
    /// `p` steps per `q` cycles, i.e. `floor(cycles * p / q)`.
    pub(crate) fn step_index(&self, p: u64, q: u64) -> i128 {
        let scaled = self.num as u128 * p as u128;
        let denom = self.den as u128 * q as u128;
        let whole = (scaled / denom) as i128;
        let rem = scaled % denom;
        if self.off_hi == 0.0 && self.off_lo == 0.0 {
            return whole;
        }
        // floor((rem + offset * p * den) / denom), all in double-double
        let pd = p as f64 * self.den as f64;
        let (oh, ol) = dd_mul(self.off_hi, self.off_lo, pd);
        let (zh, zl) = dd_add(oh, ol, rem as f64);
        let d = denom as f64;
        let mut j = (zh / d).floor();
        let (mut rh, mut rl) = dd_add(zh, zl, -(j * d));
        while rh < 0.0 || (rh == 0.0 && rl < 0.0) {
            j -= 1.0;
            (rh, rl) = dd_add(rh, rl, d);
        }
        while rh > d || (rh == d && rl >= 0.0) {
            j += 1.0;
            (rh, rl) = dd_add(rh, rl, -d);
        }
        whole + j as i128
    }

    /// Total ordering key; ties between distinct probes are broken on the
    /// exact representation so sorting is deterministic.
    pub(crate) fn sort_key(&self) -> (f64, u64, u64, u64, u64) {
        (
            self.cycles(),
            self.num,
            self.den,
            self.off_hi.to_bits(),
            self.off_lo.to_bits(),
        )
    }
}

/// `sin(2π x)` for `x` in cycles, evaluated by quadrant so that multiples of
/// a quarter cycle land exactly on 0 and ±1.
pub fn sin_cycles(x: f64) -> f64 {
    let x = x - x.floor();
    let quadrant = (x * 4.0).floor();
    let r = x - quadrant * 0.25;
    let angle = std::f64::consts::TAU * r;
    let v = match quadrant as u8 {
        0 => angle.sin(),
        1 => angle.cos(),
        2 => -angle.sin(),
        _ => -angle.cos(),
    };
    // fold -0.0 into 0.0
    v + 0.0
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn dd_add(hi: f64, lo: f64, b: f64) -> (f64, f64) {
    let (s, e) = two_sum(hi, b);
    let (s, e2) = two_sum(s, e + lo);
    (s, e2)
}

fn dd_mul(hi: f64, lo: f64, b: f64) -> (f64, f64) {
    let (p, e) = two_prod(hi, b);
    two_sum(p, e + lo * b)
}
