//! Floating-point values with a separate binary exponent, for series
//! coefficients that run far outside the `f64` range.

use std::cmp::Ordering;

/// `mant · 2^exp` with `|mant| ∈ [0.5, 1)` or `mant == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mant: f64,
    pub exp: i32,
}

/// Splits a finite non-zero `x` into `(m, e)` with `x = m·2^e`, `|m| ∈ [0.5, 1)`.
fn frexp(x: f64) -> (f64, i32) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i32;
    if raw == 0 {
        // subnormal
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let e = raw - 1022;
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (m, e)
}

/// `x · 2^e` without intermediate overflow for moderate `e`.
pub fn ldexp(x: f64, e: i32) -> f64 {
    if e > 1000 {
        return ldexp(x * 2f64.powi(1000), e - 1000);
    }
    if e < -1000 {
        return ldexp(x * 2f64.powi(-1000), e + 1000);
    }
    x * 2f64.powi(e)
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { mant: 0.0, exp: 0 };
    pub const ONE: Scaled = Scaled { mant: 0.5, exp: 1 };

    pub fn new(x: f64) -> Self {
        let (mant, exp) = frexp(x);
        Self { mant, exp }
    }

    fn renorm(mant: f64, exp: i32) -> Self {
        if mant == 0.0 {
            return Self::ZERO;
        }
        let (m, e) = frexp(mant);
        Self { mant: m, exp: exp + e }
    }

    pub fn to_f64(self) -> f64 {
        ldexp(self.mant, self.exp)
    }

    pub fn is_zero(self) -> bool {
        self.mant == 0.0
    }

    pub fn mul_f64(self, x: f64) -> Self {
        Self::renorm(self.mant * x, self.exp)
    }

    pub fn mul(self, other: Self) -> Self {
        Self::renorm(self.mant * other.mant, self.exp + other.exp)
    }

    pub fn sub(self, other: Self) -> Self {
        if other.is_zero() {
            return self;
        }
        if self.is_zero() {
            return Self::new(-other.mant).with_exp_offset(other.exp);
        }
        let exp = self.exp.max(other.exp);
        let a = ldexp(self.mant, self.exp - exp);
        let b = ldexp(other.mant, other.exp - exp);
        Self::renorm(a - b, exp)
    }

    fn with_exp_offset(self, e: i32) -> Self {
        Self {
            mant: self.mant,
            exp: self.exp + e,
        }
    }

    /// log2 of the magnitude; `-inf` for zero.
    pub fn log2_abs(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mant.abs().log2() + self.exp as f64
        }
    }

    /// Relative distance `|a − b| / max(|a|, |b|)`.
    pub fn rel_diff(self, other: Self) -> f64 {
        let d = self.sub(other);
        if d.is_zero() {
            return 0.0;
        }
        let big = match self.log2_abs().partial_cmp(&other.log2_abs()) {
            Some(Ordering::Less) => other,
            _ => self,
        };
        (d.log2_abs() - big.log2_abs()).exp2()
    }
}
