use crate::{Error, Result};
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

/// Contour and quadrature parameters for the quantum dilogarithm.
///
/// The contour runs along the real axis with an upper semicircle of radius
/// `epsilon` around 0. Rays are integrated on dyadic panels up to at least
/// `truncation` (extended automatically when the integrand decays slowly).
/// `nodes` Gauss-Legendre points are used per panel and doubled until two
/// successive results agree to `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub epsilon: f64,
    pub truncation: f64,
    pub nodes: usize,
    pub tol: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec { epsilon: 0.5, truncation: 20.0, nodes: 64, tol: 1e-10 }
    }
}

impl ContourSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument("contour epsilon must lie in (0, 1)".into()));
        }
        if self.truncation < 20.0 || self.nodes < 64 || self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidArgument(
                "contour needs truncation >= 20, nodes >= 64 and tol > 0".into(),
            ));
        }
        Ok(())
    }
}

const MAX_NODES: usize = 4096;

/// Gauss-Legendre nodes and weights.
type Rule = Arc<Vec<(f64, f64)>>;

fn gl_rule(n: usize) -> Rule {
    static RULES: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let map = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock();
    guard
        .entry(n)
        .or_insert_with(|| {
            let rule = GaussLegendre::new(n).expect("degree >= 2");
            let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            Arc::new(pairs)
        })
        .clone()
}

/// True if `z` is within `tol` of a pole of φ_r.
///
/// Poles sit on the real axis at `jπ/r` for even `j >= r+1`, odd `j >= 2r+1`,
/// odd `j <= -1` and even `j <= -(r+1)`.
fn near_pole(z: Complex64, r: u32, tol: f64) -> bool {
    if z.im.abs() > tol {
        return false;
    }
    let r = r as i64;
    let step = PI / r as f64;
    let j = (z.re / step).round() as i64;
    if (z.re - j as f64 * step).abs() > tol {
        return false;
    }
    let even = j % 2 == 0;
    if j > 0 {
        (even && j > r) || (!even && j > 2 * r)
    } else {
        (!even && j < 0) || (even && j < -r)
    }
}

fn strip_once(z: Complex64, r: u32, spec: &ContourSpec, n: usize, x_max: f64) -> Complex64 {
    let rule = gl_rule(n);
    let i = Complex64::i();
    let b = 2.0 * PI / r as f64;
    let w = 2.0 * z - PI;
    let eps = spec.epsilon;

    // Upper semicircle from -eps to eps, parametrized by θ from π down to 0.
    let mut semi = Complex64::new(0.0, 0.0);
    for &(t, wt) in rule.iter() {
        let th = 0.5 * PI * (1.0 + t);
        let x = Complex64::from_polar(eps, th);
        let f = (w * x).exp() / (4.0 * x * (PI * x).sinh() * (b * x).sinh());
        semi -= f * i * x * (0.5 * PI * wt);
    }

    // Both rays folded onto [eps, ∞): f(x) + f(-x), written with decaying exponentials.
    let mut ray = Complex64::new(0.0, 0.0);
    let mut a = eps;
    while a < x_max {
        let bb = 2.0 * a;
        let half = 0.5 * (bb - a);
        let mid = 0.5 * (bb + a);
        for &(t, wt) in rule.iter() {
            let x = mid + half * t;
            let num = ((w - PI - b) * x).exp() - ((-w - PI - b) * x).exp();
            let den = x * (-(-2.0 * PI * x).exp_m1()) * (-(-2.0 * b * x).exp_m1());
            ray += num / den * (half * wt);
        }
        a = bb;
    }
    Complex64::new(0.0, 4.0 * PI / r as f64) * (ray + semi)
}

fn phi_strip(z: Complex64, r: u32, spec: &ContourSpec) -> Result<Complex64> {
    let b = 2.0 * PI / r as f64;
    let lambda = PI + b - (2.0 * z.re - PI).abs();
    let x_max = spec.truncation.max(48.0 / lambda);
    let mut n = spec.nodes;
    let mut prev = strip_once(z, r, spec, n, x_max);
    while n < MAX_NODES {
        n *= 2;
        let cur = strip_once(z, r, spec, n, x_max);
        if (cur - prev).norm() <= spec.tol * cur.norm().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged(format!("phi_r({z}) with r = {r}")))
}

/// Quantum dilogarithm φ_r(z) = (4πi/r) ∫_Ω e^{(2z-π)x} / (4x sinh(πx) sinh(2πx/r)) dx.
///
/// The integral defines φ_r on the strip `-π/r < Re z < π + π/r`. Outside it
/// the function is continued with the shift relation
/// `φ_r(z - π/r) - φ_r(z + π/r) = (4πi/r) log(1 - e^{2iz})`.
pub fn phi_r(z: Complex64, r: u32, spec: &ContourSpec) -> Result<Complex64> {
    if r < 3 || r.is_multiple_of(2) {
        return Err(Error::InvalidRoot(r as i64));
    }
    spec.validate()?;
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidArgument(format!("phi_r of non-finite {z}")));
    }
    if near_pole(z, r, 1e-6) {
        return Err(Error::NearPole(format!("phi_r({z}), r = {r}")));
    }
    let rf = r as f64;
    let lo = -PI / rf;
    let hi = PI + PI / rf;
    let step = 2.0 * PI / rf;
    let c = Complex64::new(0.0, 4.0 * PI / rf);
    let one = Complex64::new(1.0, 0.0);
    let e2i = |u: Complex64| (Complex64::i() * 2.0 * u).exp();
    if z.re >= hi {
        let mut n = ((z.re - hi) / step).floor() as i64 + 1;
        while z.re - n as f64 * step >= hi {
            n += 1;
        }
        let base = phi_strip(z - n as f64 * step, r, spec)?;
        let s: Complex64 = (1..=n).map(|k| (one - e2i(z - (2 * k - 1) as f64 * PI / rf)).ln()).sum();
        Ok(base - c * s)
    } else if z.re <= lo {
        let mut n = ((lo - z.re) / step).floor() as i64 + 1;
        while z.re + n as f64 * step <= lo {
            n += 1;
        }
        let base = phi_strip(z + n as f64 * step, r, spec)?;
        let s: Complex64 = (1..=n).map(|k| (one - e2i(z + (2 * k - 1) as f64 * PI / rf)).ln()).sum();
        Ok(base + c * s)
    } else {
        phi_strip(z, r, spec)
    }
}

/// Memoized values `φ_r(jπ/r)` for integer `j`, the only arguments needed by
/// the quantum-dilogarithm evaluation of 6j-symbols.
#[derive(Debug)]
pub struct PhiTable {
    r: u32,
    spec: ContourSpec,
    values: Mutex<HashMap<i64, Complex64>>,
}

impl PhiTable {
    pub fn new(r: u32, spec: ContourSpec) -> Result<Self> {
        if r < 3 || r.is_multiple_of(2) {
            return Err(Error::InvalidRoot(r as i64));
        }
        spec.validate()?;
        Ok(PhiTable { r, spec, values: Mutex::new(HashMap::new()) })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn get(&self, j: i64) -> Result<Complex64> {
        if let Some(v) = self.values.lock().get(&j) {
            return Ok(*v);
        }
        let v = phi_r(Complex64::new(j as f64 * PI / self.r as f64, 0.0), self.r, &self.spec)?;
        self.values.lock().insert(j, v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pole_set() {
        let r = 7;
        let p = |j: i64| Complex64::new(j as f64 * PI / r as f64, 0.0);
        assert!(near_pole(p(8), r, 1e-6));
        assert!(near_pole(p(15), r, 1e-6));
        assert!(!near_pole(p(9), r, 1e-6));
        assert!(near_pole(p(-1), r, 1e-6));
        assert!(near_pole(p(-8), r, 1e-6));
        assert!(!near_pole(p(-2), r, 1e-6));
        assert!(!near_pole(p(1), r, 1e-6));
        assert!(matches!(phi_r(p(8), r, &ContourSpec::default()), Err(Error::NearPole(_))));
    }

    #[test]
    fn rejects_bad_contour() {
        let spec = ContourSpec { epsilon: 1.5, ..Default::default() };
        assert!(phi_r(Complex64::new(1.0, 0.0), 7, &spec).is_err());
    }

    #[test]
    fn extension_is_consistent_with_shift_relation() {
        let r = 9;
        let spec = ContourSpec::default();
        let z = Complex64::new(3.2, 0.05);
        let a = phi_r(z - PI / r as f64, r, &spec).unwrap();
        let b = phi_r(z + PI / r as f64, r, &spec).unwrap();
        let lhs = Complex64::new(1.0, 0.0) - (Complex64::i() * 2.0 * z).exp();
        let rhs = (r as f64 / (Complex64::i() * 4.0 * PI) * (a - b)).exp();
        assert!((lhs - rhs).norm() < 1e-9 * lhs.norm());
    }
}
