use super::li2::zeta;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// `ζ(2n) / (n (2n+1))` for n = 1..=60.
fn coeffs() -> &'static [f64; 60] {
    static C: OnceLock<[f64; 60]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [0.0; 60];
        for (i, slot) in c.iter_mut().enumerate() {
            let n = (i + 1) as f64;
            *slot = zeta(2.0 * n) / (n * (2.0 * n + 1.0));
        }
        c
    })
}

/// Lobachevsky function `Λ(θ) = -∫_0^θ log|2 sin t| dt`.
///
/// Evaluated from the expansion of `log(sin t / t)` about 0 after reducing
/// θ into [0, π/2] by π-periodicity and oddness:
/// `Λ(θ) = θ(1 - log 2θ) + Σ_n ζ(2n) θ (θ/π)^{2n} / (n(2n+1))`.
pub fn lobachevsky(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(PI);
    let mut sign = 1.0;
    if t > PI / 2.0 {
        t = PI - t;
        sign = -1.0;
    }
    if t == 0.0 {
        return 0.0;
    }
    let x2 = (t / PI) * (t / PI);
    let mut p = x2;
    let mut s = 0.0;
    for c in coeffs() {
        let term = c * p;
        s += term;
        if term < 1e-18 * s {
            break;
        }
        p *= x2;
    }
    sign * t * (1.0 - (2.0 * t).ln() + s)
}

/// `v_8 = 8 Λ(π/4)`, the volume of the regular ideal octahedron.
pub fn v8() -> f64 {
    8.0 * lobachevsky(PI / 4.0)
}
