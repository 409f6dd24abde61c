//! The potential `U(α, ξ)` of a single building block, its real slice `V`,
//! the critical-value function `W(α) = U(α, ξ(α))`, and volumes of truncated
//! hyperideal tetrahedra.

use super::tetra::{eta, is_hyperideal_type, tau};
use crate::specfun::{li2, lobachevsky, log_one_minus_exp2i};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

type C = Complex64;

const ONE: C = C::new(1.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Tolerance of the domain checks on real parts.
const DOMAIN_TOL: f64 = 1e-9;

/// `Li₂(e^{2iw})`.
fn li2e(w: C) -> Result<C> {
    li2((I * 2.0 * w).exp())
}

/// `L(w) = log(1 - e^{2iw})`, so that `d/dw Li₂(e^{2iw}) = -2i L(w)`.
fn lg(w: C) -> C {
    log_one_minus_exp2i(w)
}

/// `L'(w) = -2i e^{2iw} / (1 - e^{2iw})`.
fn lg_prime(w: C) -> C {
    let e = (I * 2.0 * w).exp();
    -2.0 * I * e / (ONE - e)
}

fn pi() -> C {
    C::new(PI, 0.0)
}

/// Checks that `(Re α, Re ξ)` lies in the closure of the admissible region:
/// `Re α` of hyperideal type and `max Re τ_i <= Re ξ <= min(Re η_j, 2π)`.
pub fn check_domain(alpha: &[C; 6], xi: C) -> Result<()> {
    let re = alpha.map(|a| a.re);
    if !is_hyperideal_type(&re, DOMAIN_TOL) {
        return Err(Error::InvalidArgument(format!("Re α = {re:?} is not of hyperideal type")));
    }
    let (lo, hi) = xi_bounds(&re);
    if xi.re < lo - DOMAIN_TOL || xi.re > hi + DOMAIN_TOL {
        return Err(Error::InvalidArgument(format!("Re ξ = {} outside [{lo}, {hi}]", xi.re)));
    }
    Ok(())
}

/// `[max τ_i, min(η_j, 2π)]` for real angles.
fn xi_bounds(alpha: &[f64; 6]) -> (f64, f64) {
    let t = tau(alpha);
    let e = eta(alpha);
    let lo = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let hi = e.iter().copied().fold(TAU, f64::min);
    (lo, hi)
}

/// `U(α, ξ)`, principal branches throughout.
pub fn potential_u(alpha: &[C; 6], xi: C) -> Result<C> {
    check_domain(alpha, xi)?;
    potential_u_unchecked(alpha, xi)
}

pub(crate) fn potential_u_unchecked(alpha: &[C; 6], xi: C) -> Result<C> {
    let t = tau(alpha);
    let e = eta(alpha);
    let p = pi();
    let mut u = p * p + (xi - p) * (xi - p);
    let mut l = C::new(-2.0 * PI * PI / 6.0, 0.0) - li2e(xi - p)?;
    for ti in &t {
        u -= 0.5 * (ti - p) * (ti - p) + (xi - ti) * (xi - ti);
        l += 0.5 * li2e(ti - p)? + li2e(xi - ti)?;
        for ej in &e {
            u += 0.5 * (ej - ti) * (ej - ti);
            l -= 0.5 * li2e(ej - ti)?;
        }
    }
    for ej in &e {
        u -= (ej - xi) * (ej - xi);
        l += li2e(ej - xi)?;
    }
    Ok(u + l)
}

/// `∂U/∂ξ`.
pub fn du_dxi(alpha: &[C; 6], xi: C) -> C {
    let t = tau(alpha);
    let e = eta(alpha);
    let p = pi();
    let mut d = 2.0 * (xi - p) + 2.0 * I * lg(xi - p);
    for ti in &t {
        d -= 2.0 * (xi - ti) + 2.0 * I * lg(xi - ti);
    }
    for ej in &e {
        d += 2.0 * (ej - xi) + 2.0 * I * lg(ej - xi);
    }
    d
}

/// `∂²U/∂ξ²`.
pub fn d2u_dxi2(alpha: &[C; 6], xi: C) -> C {
    let t = tau(alpha);
    let e = eta(alpha);
    let mut d = C::new(-12.0, 0.0) + 2.0 * I * lg_prime(xi - pi());
    for ti in &t {
        d -= 2.0 * I * lg_prime(xi - ti);
    }
    for ej in &e {
        d -= 2.0 * I * lg_prime(ej - xi);
    }
    d
}

/// `∂U/∂α_k` for the six edge slots.
pub fn du_dalpha(alpha: &[C; 6], xi: C) -> [C; 6] {
    use super::tetra::{QUADS, TRIANGLES};
    let t = tau(alpha);
    let e = eta(alpha);
    let p = pi();
    let mut dt = [C::new(0.0, 0.0); 4];
    for (i, ti) in t.iter().enumerate() {
        let mut d = -(ti - p) + 2.0 * (xi - ti) - I * lg(ti - p) + 2.0 * I * lg(xi - ti);
        for ej in &e {
            d -= (ej - ti) + I * lg(ej - ti);
        }
        dt[i] = d;
    }
    let mut de = [C::new(0.0, 0.0); 3];
    for (j, ej) in e.iter().enumerate() {
        let mut d = -2.0 * (ej - xi) - 2.0 * I * lg(ej - xi);
        for ti in &t {
            d += (ej - ti) + I * lg(ej - ti);
        }
        de[j] = d;
    }
    let mut g = [C::new(0.0, 0.0); 6];
    for (i, tri) in TRIANGLES.iter().enumerate() {
        for &k in tri {
            g[k] += 0.5 * dt[i];
        }
    }
    for (j, quad) in QUADS.iter().enumerate() {
        for &k in quad {
            g[k] += 0.5 * de[j];
        }
    }
    g
}

/// `δ(x, y, z)` of the real slice.
fn delta_lob(x: f64, y: f64, z: f64) -> f64 {
    0.5 * (lobachevsky((x + y + z) / 2.0)
        - lobachevsky((x + y - z) / 2.0)
        - lobachevsky((y + z - x) / 2.0)
        - lobachevsky((z + x - y) / 2.0))
}

/// `V(α, ξ)` on the real slice, built from the Lobachevsky function, so that
/// `U = 2π² + 2i V` there.
pub fn potential_v(alpha: &[f64; 6], xi: f64) -> f64 {
    use super::tetra::TRIANGLES;
    let t = tau(alpha);
    let e = eta(alpha);
    let mut v = -lobachevsky(xi);
    for tri in &TRIANGLES {
        v += delta_lob(alpha[tri[0]], alpha[tri[1]], alpha[tri[2]]);
    }
    v += t.iter().map(|ti| lobachevsky(xi - ti)).sum::<f64>();
    v += e.iter().map(|ej| lobachevsky(ej - xi)).sum::<f64>();
    v
}

/// Solves `∂U/∂ξ = 0` by Newton's method from `7π/4`.
///
/// Steps are halved while they increase the residual; a secant step replaces
/// Newton when `|∂²U/∂ξ²| < 1e-8`. Converges to `|∂U/∂ξ| < 1e-12` within 50
/// iterations or fails with the iterate trace.
pub fn xi_of_alpha(alpha: &[C; 6]) -> Result<C> {
    let re = alpha.map(|a| a.re);
    let (lo, hi) = xi_bounds(&re);
    let mut xi = C::new(1.75 * PI, 0.0);
    if xi.re < lo || xi.re > hi {
        xi = C::new(0.5 * (lo + hi), 0.0);
    }
    let mut f = du_dxi(alpha, xi);
    let mut prev: Option<(C, C)> = None;
    let mut trace = Vec::new();
    for _ in 0..50 {
        trace.push(xi);
        if f.norm() < 1e-12 {
            return Ok(xi);
        }
        let h = d2u_dxi2(alpha, xi);
        let slope = match prev {
            Some((x0, f0)) if h.norm() < 1e-8 && x0 != xi => (f - f0) / (xi - x0),
            _ => h,
        };
        let step = f / slope;
        let mut lambda = 1.0;
        let (mut next, mut fnext);
        loop {
            next = xi - step * lambda;
            fnext = du_dxi(alpha, next);
            if fnext.norm() < f.norm() || lambda < 1e-6 {
                break;
            }
            lambda *= 0.5;
        }
        prev = Some((xi, f));
        xi = next;
        f = fnext;
    }
    if f.norm() < 1e-12 {
        return Ok(xi);
    }
    Err(Error::SolverFailed(format!(
        "ξ(α) Newton did not converge (|∂U/∂ξ| = {:e}); last iterates {:?}",
        f.norm(),
        &trace[trace.len().saturating_sub(3)..]
    )))
}

/// `W(α) = U(α, ξ(α))`.
pub fn potential_w(alpha: &[C; 6]) -> Result<C> {
    let xi = xi_of_alpha(alpha)?;
    potential_u_unchecked(alpha, xi)
}

/// Volume of the truncated hyperideal tetrahedron with dihedral angles
/// `θ_k` at the six edges (`θ = 0` is the regular ideal octahedron).
///
/// Evaluates `V(α, ξ(α))` with `α_k = π - θ_k`.
pub fn truncated_tet_volume(theta: &[f64; 6]) -> Result<f64> {
    if theta.iter().any(|t| !(0.0..=PI).contains(t)) {
        return Err(Error::InvalidArgument(format!("dihedral angles {theta:?} outside [0, π]")));
    }
    let alpha = theta.map(|t| PI - t);
    if !is_hyperideal_type(&alpha, DOMAIN_TOL) {
        return Err(Error::InvalidArgument(format!(
            "dihedral angles {theta:?} do not bound a truncated hyperideal tetrahedron"
        )));
    }
    let xi = xi_of_alpha(&alpha.map(|a| C::new(a, 0.0)))?;
    Ok(potential_v(&alpha, xi.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::v8;

    fn c6(a: [f64; 6]) -> [C; 6] {
        a.map(|x| C::new(x, 0.0))
    }

    fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        while b - a > 1e-12 {
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        0.5 * (a + b)
    }

    #[test]
    fn complete_structure_values() {
        let a = c6([PI; 6]);
        let xi = C::new(1.75 * PI, 0.0);
        let u = potential_u(&a, xi).unwrap();
        assert!((u.re - 2.0 * PI * PI).abs() < 1e-10);
        assert!((u.im - 2.0 * v8()).abs() < 1e-10);
        assert!(du_dxi(&a, xi).norm() < 1e-12);
        assert!((d2u_dxi2(&a, xi) - C::new(0.0, -16.0)).norm() < 1e-12);
        assert!((xi_of_alpha(&a).unwrap() - xi).norm() < 1e-12);
        assert!((truncated_tet_volume(&[0.0; 6]).unwrap() - 8.0 * lobachevsky(PI / 4.0)).abs() < 1e-10);
    }

    #[test]
    fn real_slice_matches_lobachevsky_form() {
        let alpha = [3.0, 3.3, 2.9, 3.2, 3.05, 3.4];
        let xi_star = xi_of_alpha(&c6(alpha)).unwrap().re;
        for xi in [xi_star - 0.1, xi_star, xi_star + 0.05] {
            let u = potential_u(&c6(alpha), C::new(xi, 0.0)).unwrap();
            assert!((u.re - 2.0 * PI * PI).abs() < 1e-10, "{u}");
            assert!((u.im - 2.0 * potential_v(&alpha, xi)).abs() < 1e-10);
        }
    }

    #[test]
    fn xi_agrees_with_golden_section_oracle() {
        for alpha in [[3.0, 3.3, 2.9, 3.2, 3.05, 3.4], [2.5, 2.6, 2.7, 2.8, 2.9, 3.0], [PI; 6]] {
            let (lo, hi) = xi_bounds(&alpha);
            let oracle = golden_max(|x| potential_v(&alpha, x), lo, hi);
            let xi = xi_of_alpha(&c6(alpha)).unwrap();
            assert!(xi.im.abs() < 1e-12);
            assert!((xi.re - oracle).abs() < 1e-6, "{} vs {oracle}", xi.re);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let a = [
            C::new(3.0, 0.05),
            C::new(3.3, -0.02),
            C::new(2.9, 0.01),
            C::new(3.2, 0.0),
            C::new(3.05, 0.03),
            C::new(3.4, -0.04),
        ];
        let xi = C::new(5.4, 0.02);
        let h = 1e-6;
        let g = du_dalpha(&a, xi);
        for k in 0..6 {
            let mut ap = a;
            let mut am = a;
            ap[k] += h;
            am[k] -= h;
            let fd = (potential_u(&ap, xi).unwrap() - potential_u(&am, xi).unwrap()) / (2.0 * h);
            assert!((fd - g[k]).norm() < 1e-6 * (1.0 + g[k].norm()), "slot {k}: {fd} vs {}", g[k]);
        }
        let fd = (potential_u(&a, xi + h).unwrap() - potential_u(&a, xi - h).unwrap()) / (2.0 * h);
        assert!((fd - du_dxi(&a, xi)).norm() < 1e-6);
        let fd2 = (du_dxi(&a, xi + h) - du_dxi(&a, xi - h)) / (2.0 * h);
        assert!((fd2 - d2u_dxi2(&a, xi)).norm() < 1e-6);
    }

    #[test]
    fn v_hessian_at_complete_structure() {
        let x0 = [PI, PI, PI, PI, PI, PI, 1.75 * PI];
        let f = |x: &[f64; 7]| potential_v(&[x[0], x[1], x[2], x[3], x[4], x[5]], x[6]);
        let h = 1e-4;
        let d2 = |i: usize, j: usize| {
            let mut s = 0.0;
            for (si, sj, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                let mut x = x0;
                x[i] += si * h;
                x[j] += sj * h;
                s += w * f(&x);
            }
            s / (4.0 * h * h)
        };
        // Values of the definition itself, confirmed with a 30-digit mpmath
        // evaluation of U; the αα entries are half of the commonly quoted -2, -1.
        assert!((d2(0, 0) + 1.0).abs() < 1e-6);
        assert!((d2(0, 4) + 0.5).abs() < 1e-6);
        assert!((d2(2, 6) - 2.0).abs() < 1e-6);
        assert!((d2(6, 6) + 8.0).abs() < 1e-6);
    }

    #[test]
    fn volume_drops_away_from_zero_angles() {
        let v0 = truncated_tet_volume(&[0.0; 6]).unwrap();
        let mut prev = v0;
        for k in 1..5 {
            let t = 0.1 * k as f64;
            let v = truncated_tet_volume(&[t; 6]).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(truncated_tet_volume(&[3.0; 6]).is_err());
    }
}
