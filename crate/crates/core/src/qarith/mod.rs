//! Arithmetic at the root of unity `q = exp(2πi/r)`: quantum integers and
//! factorials, the Kirby-color normalization `μ_r`, and overflow-safe
//! log-space complex numbers with deterministic summation.

mod logc;
mod sum;

pub use logc::{wrap_phase, LogComplex};
pub use sum::{log_sum, par_log_sum, Precision};

use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Precomputed data for one odd root order `r`.
#[derive(Debug, Clone)]
pub struct RootContext {
    r: u32,
    /// `log |[n]!|` for `n = 0..=r-1`.
    log_fact: Vec<f64>,
    /// Sign of `[n]!` for `n = 0..=r-1`.
    sign_fact: Vec<i8>,
}

impl RootContext {
    pub fn new(r: i64) -> Result<Self> {
        if r < 3 || r % 2 == 0 || r > u32::MAX as i64 {
            return Err(Error::InvalidRoot(r));
        }
        let r32 = r as u32;
        let mut log_fact = Vec::with_capacity(r as usize);
        let mut sign_fact = Vec::with_capacity(r as usize);
        log_fact.push(0.0);
        sign_fact.push(1i8);
        let (mut s, mut c) = (0.0f64, 0.0f64);
        let mut sign = 1i8;
        let base = (TAU / r as f64).sin();
        for n in 1..r {
            let v = (TAU * n as f64 / r as f64).sin() / base;
            let t = v.abs().ln();
            let sum = s + t;
            c += if s.abs() >= t.abs() { (s - sum) + t } else { (t - sum) + s };
            s = sum;
            if v < 0.0 {
                sign = -sign;
            }
            log_fact.push(s + c);
            sign_fact.push(sign);
        }
        Ok(RootContext { r: r32, log_fact, sign_fact })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `q = exp(2πi/r)`.
    pub fn q(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU / self.r as f64)
    }

    /// `μ_r = 2 sin(2π/r) / sqrt(r)`.
    pub fn mu(&self) -> f64 {
        2.0 * (TAU / self.r as f64).sin() / (self.r as f64).sqrt()
    }

    /// Quantum integer `[n] = sin(2πn/r) / sin(2π/r)`.
    pub fn qint(&self, n: i64) -> f64 {
        let red = n.rem_euclid(self.r as i64) as f64;
        (TAU * red / self.r as f64).sin() / (TAU / self.r as f64).sin()
    }

    /// Quantum factorial `[n]!` for `0 <= n <= r-1` (all nonzero).
    pub fn qfact(&self, n: u32) -> LogComplex {
        let i = n as usize;
        assert!(i < self.log_fact.len(), "[n]! requested for n = {n} >= r = {}", self.r);
        let phase = if self.sign_fact[i] < 0 { PI } else { 0.0 };
        LogComplex::new(self.log_fact[i], phase)
    }

    /// Checked `[n]!` for `0 <= n <= r-2`.
    pub fn quantum_factorial(&self, n: i64) -> Result<LogComplex> {
        self.check_factorial_arg(n)?;
        Ok(self.qfact(n as u32))
    }

    /// `{n}! = ∏_{k=1}^{n} {k}` for `0 <= n <= r-2`.
    pub fn braced_factorial(&self, n: i64) -> Result<LogComplex> {
        self.check_factorial_arg(n)?;
        Ok((1..=n).map(|k| LogComplex::from_complex(self.brace(k))).product())
    }

    fn check_factorial_arg(&self, n: i64) -> Result<()> {
        if (0..=self.r as i64 - 2).contains(&n) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("factorial argument {n} outside [0, {}]", self.r - 2)))
        }
    }

    /// `log |[n]!|` and its sign, for `0 <= n <= r-1`.
    pub fn qfact_parts(&self, n: u32) -> (f64, i8) {
        (self.log_fact[n as usize], self.sign_fact[n as usize])
    }

    /// `{n} = q^{n/2} - q^{-n/2} = 2i sin(πn/r)`.
    pub fn brace(&self, n: i64) -> Complex64 {
        let red = n.rem_euclid(2 * self.r as i64) as f64;
        Complex64::new(0.0, 2.0 * (PI * red / self.r as f64).sin())
    }

    /// Exact phase `q^{num/den}` with the exponent reduced before rounding.
    pub fn q_pow(&self, num: i64, den: i64) -> LogComplex {
        assert!(den > 0);
        let m = den as i128 * self.r as i128;
        let red = (num as i128).rem_euclid(m);
        LogComplex::unit(TAU * red as f64 / m as f64)
    }

    /// The color set `I_r = {0, 2, ..., r-3}`.
    pub fn colors(&self) -> impl Iterator<Item = u32> + Clone {
        (0..=self.r - 3).step_by(2)
    }
}

/// `(-1)^k` as a unit phase.
pub fn sign_phase(k: i64) -> LogComplex {
    if k.rem_euclid(2) == 0 {
        LogComplex::ONE
    } else {
        LogComplex::unit(PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_and_small_r() {
        assert!(RootContext::new(4).is_err());
        assert!(RootContext::new(1).is_err());
        assert!(RootContext::new(5).is_ok());
    }

    #[test]
    fn factorial_table_matches_direct_product() {
        let ctx = RootContext::new(13).unwrap();
        let mut p = 1.0;
        for n in 1..13u32 {
            p *= ctx.qint(n as i64);
            let f = ctx.qfact(n).to_complex();
            assert!((f.re - p).abs() < 1e-12 * p.abs().max(1.0));
            assert!(f.im.abs() < 1e-12 * p.abs().max(1.0));
        }
    }

    #[test]
    fn mu_value_r5() {
        let ctx = RootContext::new(5).unwrap();
        assert!((1.0 / ctx.mu() - 1.175_570_504_584_946).abs() < 1e-12);
    }

    #[test]
    fn brace_matches_definition() {
        let ctx = RootContext::new(9).unwrap();
        for n in -5..20i64 {
            let a = ctx.q().powf(n as f64 / 2.0) - ctx.q().powf(-(n as f64) / 2.0);
            assert!((a - ctx.brace(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn q_pow_is_exact_for_large_exponents() {
        let ctx = RootContext::new(7).unwrap();
        let a = ctx.q_pow(7_000_000_001, 2);
        let b = ctx.q_pow(1, 2);
        assert!((a.phase - b.phase).abs() < 1e-15);
    }

    #[test]
    fn quantum_integer_examples() {
        let ctx = RootContext::new(5).unwrap();
        assert_eq!(ctx.qint(1), 1.0);
        assert_eq!(ctx.qint(0), 0.0);
        assert!((ctx.qint(2) - 0.618_033_988_749_894_8).abs() < 1e-12);
        let ctx = RootContext::new(9).unwrap();
        for n in 0..=9 {
            assert!((ctx.qint(9 - n) + ctx.qint(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn checked_factorials() {
        let ctx = RootContext::new(7).unwrap();
        assert_eq!(ctx.quantum_factorial(0).unwrap(), LogComplex::ONE);
        let f5 = ctx.quantum_factorial(5).unwrap();
        assert_eq!(f5.phase, 0.0);
        assert!(ctx.quantum_factorial(6).is_err());
        assert!(ctx.quantum_factorial(-1).is_err());
        let b3 = ctx.braced_factorial(3).unwrap().to_complex();
        let direct: Complex64 =
            (1..=3).map(|k| Complex64::new(0.0, 2.0 * (PI * k as f64 / 7.0).sin())).product();
        assert!((b3 - direct).norm() < 1e-13);
        assert!(ctx.braced_factorial(6).is_err());
        let ctx = RootContext::new(5).unwrap();
        assert!((ctx.quantum_factorial(2).unwrap().to_complex().re - 0.618_033_988_749_894_8).abs() < 1e-12);
    }
}
