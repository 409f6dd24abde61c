use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::{PI, TAU};
use std::ops::{Div, Mul, Neg};

/// Wraps an angle into (-π, π].
pub fn wrap_phase(p: f64) -> f64 {
    let x = p.rem_euclid(TAU);
    if x > PI {
        x - TAU
    } else {
        x
    }
}

/// A complex number stored as `exp(log_mag + i*phase)`.
///
/// Zero is represented by `log_mag = -inf` (phase 0). The phase is always kept
/// in (-π, π]. Products and quotients never overflow, which lets quantum
/// factorials and 6j-symbols at large r be handled without rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    #[serde(serialize_with = "ser_log_mag", deserialize_with = "de_log_mag")]
    pub log_mag: f64,
    pub phase: f64,
}

fn ser_log_mag<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn de_log_mag<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NEG_INFINITY))
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex { log_mag: f64::NEG_INFINITY, phase: 0.0 };
    pub const ONE: LogComplex = LogComplex { log_mag: 0.0, phase: 0.0 };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex { log_mag, phase: wrap_phase(phase) }
    }

    /// `exp(z)` without forming the possibly overflowing value.
    pub fn exp(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        LogComplex { log_mag: z.norm().ln(), phase: z.arg() }
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            LogComplex { log_mag: x.ln(), phase: 0.0 }
        } else {
            LogComplex { log_mag: (-x).ln(), phase: PI }
        }
    }

    /// Unit-modulus value `exp(i*phase)`.
    pub fn unit(phase: f64) -> Self {
        Self::new(0.0, phase)
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }

    /// Principal logarithm `log_mag + i*phase`.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.log_mag, self.phase)
    }

    pub fn abs(&self) -> f64 {
        self.log_mag.exp()
    }

    pub fn inv(&self) -> Self {
        LogComplex { log_mag: -self.log_mag, phase: wrap_phase(-self.phase) }
    }

    pub fn conj(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        LogComplex { log_mag: self.log_mag, phase: wrap_phase(-self.phase) }
    }

    pub fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return if n > 0 { Self::ZERO } else { LogComplex::new(f64::INFINITY, 0.0) };
        }
        Self::new(self.log_mag * n as f64, self.phase * n as f64)
    }

    pub fn powf(&self, x: f64) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_mag * x, self.phase * x)
    }

    /// Principal square root (phase in (-π/2, π/2]).
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        LogComplex { log_mag: 0.5 * self.log_mag, phase: 0.5 * self.phase }
    }

    /// Relative distance `|a - b| / max(|a|, |b|)`, computed without overflow.
    pub fn rel_diff(&self, other: &LogComplex) -> f64 {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => 0.0,
            (true, false) | (false, true) => 1.0,
            _ => {
                let (big, small) = if self.log_mag >= other.log_mag { (self, other) } else { (other, self) };
                let ratio = (*small / *big).to_complex();
                (Complex64::new(1.0, 0.0) - ratio).norm()
            }
        }
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.log_mag + rhs.log_mag, self.phase + rhs.phase)
    }
}

impl Div for LogComplex {
    type Output = LogComplex;
    fn div(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex::new(self.log_mag - rhs.log_mag, self.phase - rhs.phase)
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;
    fn neg(self) -> LogComplex {
        if self.is_zero() {
            return self;
        }
        LogComplex::new(self.log_mag, self.phase + PI)
    }
}

impl std::iter::Product for LogComplex {
    fn product<I: Iterator<Item = LogComplex>>(iter: I) -> Self {
        iter.fold(LogComplex::ONE, |a, b| a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_complex() {
        let z = Complex64::new(-3.5, 0.25);
        let back = LogComplex::from_complex(z).to_complex();
        assert!((back - z).norm() < 1e-14);
    }

    #[test]
    fn zero_is_absorbing() {
        let a = LogComplex::from_real(2.0);
        assert!((a * LogComplex::ZERO).is_zero());
        assert!((LogComplex::ZERO / a).is_zero());
    }

    #[test]
    fn huge_products_do_not_overflow() {
        let big = LogComplex::new(700.0, 1.0);
        let p = big * big * big;
        assert_eq!(p.log_mag, 2100.0);
        assert!((p.phase - 3.0).abs() < 1e-15);
    }

    #[test]
    fn phase_is_wrapped() {
        let a = LogComplex::new(0.0, 7.0);
        assert!(a.phase > -PI && a.phase <= PI);
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
    }

    #[test]
    fn serde_zero_round_trip() {
        let s = serde_json::to_string(&LogComplex::ZERO).unwrap();
        let back: LogComplex = serde_json::from_str(&s).unwrap();
        assert!(back.is_zero());
    }
}
