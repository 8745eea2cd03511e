//! Overflow-safe reals stored as `mantissa * exp(log_scale)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

const E: f64 = std::f64::consts::E;

/// A real number `mantissa * e^log_scale` with `|mantissa|` in `[1, e)` or
/// exactly zero. `log_scale` always holds an integer value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaled {
    mantissa: f64,
    log_scale: f64,
}

/// Multiply by `e^t` in two halves so that neither factor overflows.
fn times_exp(m: f64, t: f64) -> f64 {
    if t.abs() < 700.0 {
        m * t.exp()
    } else {
        let h = (0.5 * t).exp();
        m * h * h
    }
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mantissa: 0.0,
        log_scale: 0.0,
    };
    pub const ONE: Scaled = Scaled {
        mantissa: 1.0,
        log_scale: 0.0,
    };

    /// Build `m * e^s` and normalize.
    pub fn new(m: f64, s: f64) -> Scaled {
        if m == 0.0 || !m.is_finite() || !s.is_finite() {
            if m == 0.0 {
                return Scaled::ZERO;
            }
            return Scaled {
                mantissa: m,
                log_scale: s,
            };
        }
        let s0 = s.floor();
        let mut m = times_exp(m, s - s0);
        let shift = m.abs().ln().floor();
        m = times_exp(m, -shift);
        let mut s = s0 + shift;
        while m.abs() >= E {
            m /= E;
            s += 1.0;
        }
        while m.abs() < 1.0 {
            m *= E;
            s -= 1.0;
        }
        Scaled {
            mantissa: m,
            log_scale: s,
        }
    }

    /// `sign * e^log_abs`.
    pub fn from_log(sign: f64, log_abs: f64) -> Scaled {
        if sign == 0.0 || log_abs == f64::NEG_INFINITY {
            return Scaled::ZERO;
        }
        Scaled::new(sign.signum(), log_abs)
    }

    pub fn from_f64(x: f64) -> Scaled {
        Scaled::new(x, 0.0)
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn signum(&self) -> f64 {
        if self.mantissa == 0.0 {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    /// `ln|value|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().ln() + self.log_scale
        }
    }

    /// Plain double; overflows to ±inf and underflows to 0 like `exp`.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            times_exp(self.mantissa, self.log_scale)
        }
    }

    pub fn abs(&self) -> Scaled {
        Scaled {
            mantissa: self.mantissa.abs(),
            log_scale: self.log_scale,
        }
    }

    pub fn scale(&self, c: f64) -> Scaled {
        Scaled::new(self.mantissa * c, self.log_scale)
    }

    /// `self * e^t`.
    pub fn mul_exp(&self, t: f64) -> Scaled {
        Scaled::new(self.mantissa, self.log_scale + t)
    }

    /// `self / other` as a plain double; finite whenever the true ratio is.
    pub fn ratio(&self, other: &Scaled) -> f64 {
        (*self / *other).to_f64()
    }

    pub fn recip(&self) -> Scaled {
        Scaled::ONE / *self
    }

    /// Compare magnitudes.
    pub fn cmp_abs(&self, other: &Scaled) -> Ordering {
        self.ln_abs()
            .partial_cmp(&other.ln_abs())
            .unwrap_or(Ordering::Equal)
    }
}

impl From<f64> for Scaled {
    fn from(x: f64) -> Scaled {
        Scaled::from_f64(x)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled {
            mantissa: -self.mantissa,
            log_scale: self.log_scale,
        }
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        if self.is_zero() || rhs.is_zero() {
            return Scaled::ZERO;
        }
        Scaled::new(self.mantissa * rhs.mantissa, self.log_scale + rhs.log_scale)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, rhs: Scaled) -> Scaled {
        if rhs.is_zero() {
            return Scaled {
                mantissa: self.mantissa / 0.0,
                log_scale: 0.0,
            };
        }
        if self.is_zero() {
            return Scaled::ZERO;
        }
        Scaled::new(self.mantissa / rhs.mantissa, self.log_scale - rhs.log_scale)
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, rhs: Scaled) -> Scaled {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.log_scale >= rhs.log_scale {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = small.log_scale - big.log_scale;
        if d < -60.0 {
            return big;
        }
        Scaled::new(big.mantissa + small.mantissa * d.exp(), big.log_scale)
    }
}

impl Sub for Scaled {
    type Output = Scaled;
    fn sub(self, rhs: Scaled) -> Scaled {
        self + (-rhs)
    }
}

impl Mul<f64> for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: f64) -> Scaled {
        self.scale(rhs)
    }
}

impl fmt::Display for Scaled {
    /// Textual form `m*exp(s)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16}*exp({})", self.mantissa, self.log_scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_mantissa() {
        for &x in &[1.0, 2.0, 2.7, 3.0, -5.5, 1e-300, 7e300, -0.1, 5e-324] {
            let s = Scaled::from_f64(x);
            let m = s.mantissa().abs();
            assert!((1.0..E).contains(&m), "{x}: {m}");
            assert_eq!(s.log_scale(), s.log_scale().round());
            assert!((s.to_f64() - x).abs() <= 4.0 * f64::EPSILON * x.abs(), "{x}");
        }
    }

    #[test]
    fn arithmetic_beyond_double_range() {
        let big = Scaled::from_log(1.0, 1000.0);
        let tiny = Scaled::from_log(1.0, -1000.0);
        let p = big * tiny;
        assert!((p.to_f64() - 1.0).abs() < 1e-13);
        let q = big / big.scale(2.0);
        assert!((q.to_f64() - 0.5).abs() < 1e-15);
        let s = big + big;
        assert!((s.ln_abs() - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!((big - big).is_zero());
        assert_eq!((big + tiny).ln_abs(), big.ln_abs());
        assert_eq!(big.to_f64(), f64::INFINITY);
        assert_eq!(tiny.to_f64(), 0.0);
    }

    #[test]
    fn display_form() {
        let s = Scaled::from_f64(1.0);
        assert_eq!(s.to_string(), "1.0000000000000000*exp(0)");
        assert!(Scaled::from_f64(-3.0).to_string().ends_with("*exp(1)"));
    }
}
