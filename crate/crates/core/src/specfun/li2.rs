use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

const PI2_6: f64 = PI * PI / 6.0;

/// Riemann zeta at real `s >= 2` via Euler-Maclaurin with a fixed cut.
pub fn zeta(s: f64) -> f64 {
    assert!(s >= 2.0);
    const N: usize = 12;
    // B_{2j} / (2j)! for j = 1..6
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let n = N as f64;
    let mut sum: f64 = (1..N).rev().map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    let mut rising = s; // s (s+1) ... (s+2j-2)
    for (j, b) in B.iter().enumerate() {
        sum += b * rising * n.powf(-s - 2.0 * j as f64 - 1.0);
        rising *= (s + 2.0 * j as f64 + 1.0) * (s + 2.0 * j as f64 + 2.0);
    }
    sum
}

/// Coefficients `B_{2k} / (2k+1)!` for the series in `-log(1-z)`.
fn bernoulli_coeffs() -> &'static [f64; 24] {
    static C: OnceLock<[f64; 24]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [0.0; 24];
        for (i, slot) in c.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            *slot = sign * 2.0 * zeta(2.0 * k) / ((2.0 * k + 1.0) * (2.0 * PI).powf(2.0 * k));
        }
        c
    })
}

/// Series for |z| <= 1, Re z <= 1/2, in the variable u = -log(1-z).
fn li2_core(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let u2 = u * u;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut p = u * u2;
    for c in bernoulli_coeffs() {
        let t = p * *c;
        sum += t;
        if t.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
        p *= u2;
    }
    u - u2 * 0.25 + sum
}

fn li2_unit_disc(z: Complex64) -> Complex64 {
    if z.re > 0.5 {
        // Reflection: Li2(z) = -Li2(1-z) + π²/6 - log z log(1-z).
        let w = Complex64::new(1.0, 0.0) - z;
        if w.norm() == 0.0 {
            return Complex64::new(PI2_6, 0.0);
        }
        -li2_core(w) + PI2_6 - z.ln() * w.ln()
    } else {
        li2_core(z)
    }
}

/// Principal branch of the dilogarithm, continuous on `C \ (1, ∞)`.
///
/// Arguments exactly on the open cut `(1, ∞)` are rejected.
pub fn li2(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidArgument(format!("li2 of non-finite {z}")));
    }
    if z.im == 0.0 && z.re > 1.0 {
        return Err(Error::BranchCut(format!("li2({})", z.re)));
    }
    if z.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if z.norm() <= 1.0 {
        return Ok(li2_unit_disc(z));
    }
    // Inversion: Li2(z) = -Li2(1/z) - π²/6 - log(-z)²/2.
    let l = (-z).ln();
    Ok(-li2_unit_disc(z.inv()) - PI2_6 - 0.5 * l * l)
}

/// Derivative helper: `log(1 - exp(2i w))`, principal branch.
pub fn log_one_minus_exp2i(w: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - (Complex64::i() * 2.0 * w).exp()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(z: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        let mut p = z;
        for k in 1..4000 {
            s += p / (k as f64 * k as f64);
            p *= z;
        }
        s
    }

    #[test]
    fn zeta_even_values() {
        assert!((zeta(2.0) - PI2_6).abs() < 1e-15);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-15);
        assert!((zeta(6.0) - PI.powi(6) / 945.0).abs() < 1e-15);
        assert!((zeta(40.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_power_series_inside_disc() {
        for &(x, y) in &[(0.3, 0.1), (-0.4, 0.2), (0.2, -0.45), (0.0, 0.49), (0.45, 0.0)] {
            let z = Complex64::new(x, y);
            assert!((li2(z).unwrap() - series(z)).norm() < 1e-14, "z = {z}");
        }
    }

    #[test]
    fn special_values() {
        let one = li2(Complex64::new(1.0, 0.0)).unwrap();
        assert!((one.re - PI2_6).abs() < 1e-15 && one.im.abs() < 1e-15);
        let m1 = li2(Complex64::new(-1.0, 0.0)).unwrap();
        assert!((m1.re + PI * PI / 12.0).abs() < 1e-15);
        let half = li2(Complex64::new(0.5, 0.0)).unwrap();
        let expect = PI * PI / 12.0 - 0.5 * 2f64.ln().powi(2);
        assert!((half.re - expect).abs() < 1e-15);
        let catalan = 0.915_965_594_177_219;
        let i = li2(Complex64::new(0.0, 1.0)).unwrap();
        assert!((i.re + PI * PI / 48.0).abs() < 1e-15);
        assert!((i.im - catalan).abs() < 1e-15);
    }

    #[test]
    fn rejects_open_cut() {
        assert!(matches!(li2(Complex64::new(2.0, 0.0)), Err(Error::BranchCut(_))));
        assert!(li2(Complex64::new(2.0, 1e-300)).is_ok());
    }

    #[test]
    fn inversion_identity_off_axis() {
        for &(x, y) in &[(3.0, 1.0), (-5.0, 0.5), (0.2, 4.0), (1.5, -0.7)] {
            let z = Complex64::new(x, y);
            let lhs = li2(z).unwrap() + li2(z.inv()).unwrap();
            let l = (-z).ln();
            let rhs = -PI2_6 - 0.5 * l * l;
            assert!((lhs - rhs).norm() < 1e-13, "z = {z}");
        }
    }
}
