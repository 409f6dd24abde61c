//! The system potential `G^E` of a filled presentation, its critical point,
//! and the cone-structure data read off from it.

use super::potential::{check_domain, d2u_dxi2, du_dalpha, du_dxi, potential_u_unchecked, xi_of_alpha};
use crate::filling::SurgeryPresentation;
use crate::fsl::FslPresentation;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Real angle data: `β_i` on filled components (order of `s.filled`) and
/// `α_j` on unfilled components (increasing index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeData {
    pub beta: Vec<f64>,
    pub alpha_j: Vec<f64>,
}

impl ConeData {
    /// Angles `2π n_i / r` and `2π m_j / r` realized by colors.
    pub fn from_colors(r: u32, n_i: &[u32], m_j: &[u32]) -> Self {
        let a = |m: &u32| TAU * *m as f64 / r as f64;
        ConeData { beta: n_i.iter().map(a).collect(), alpha_j: m_j.iter().map(a).collect() }
    }

    /// Largest distance of any angle from `π`.
    pub fn max_offset(&self) -> f64 {
        self.beta.iter().chain(&self.alpha_j).map(|a| (a - PI).abs()).fold(0.0, f64::max)
    }
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Largest allowed `|β_i - π|`, `|α_j - π|` unless `force` is set.
    pub gate: f64,
    pub force: bool,
    /// Convergence threshold on `max |∇G|`.
    pub tol: f64,
    pub max_iter: usize,
    /// Step of the finite-difference Hessian.
    pub hessian_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { gate: 0.3, force: false, tol: 1e-12, max_iter: 100, hessian_step: 1e-5 }
    }
}

/// `G^E` on the unknowns `x = (α_{ζ_i})_{i ∈ I} ++ (ξ_s)_s`.
#[derive(Debug, Clone)]
pub struct SystemPotential<'a> {
    p: &'a FslPresentation,
    s: &'a SurgeryPresentation,
    e: Vec<i8>,
    cone: ConeData,
    unfilled: Vec<usize>,
}

impl<'a> SystemPotential<'a> {
    pub fn new(
        p: &'a FslPresentation,
        s: &'a SurgeryPresentation,
        e: Vec<i8>,
        cone: ConeData,
    ) -> Result<Self> {
        p.ensure_valid()?;
        let unfilled = s.unfilled(p.n);
        if e.len() != s.filled.len() || e.iter().any(|v| v.abs() != 1) {
            return Err(Error::InvalidArgument(format!(
                "need {} signs in {{-1, 1}}, got {e:?}",
                s.filled.len()
            )));
        }
        if cone.beta.len() != s.filled.len() || cone.alpha_j.len() != unfilled.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} filled and {} unfilled angles",
                s.filled.len(),
                unfilled.len()
            )));
        }
        Ok(SystemPotential { p, s, e, cone, unfilled })
    }

    pub fn dim(&self) -> usize {
        self.s.filled.len() + self.p.c
    }

    /// `(π, …, π, 7π/4, …, 7π/4)`.
    pub fn initial_point(&self) -> Vec<C> {
        let mut x = vec![C::new(PI, 0.0); self.s.filled.len()];
        x.extend(std::iter::repeat_n(C::new(1.75 * PI, 0.0), self.p.c));
        x
    }

    /// Filled angles at `π` and each `ξ_s = ξ(α_s)`; equals
    /// [`initial_point`](Self::initial_point) when every angle is `π`.
    pub fn starting_point(&self) -> Result<Vec<C>> {
        let mut x = self.initial_point();
        let comp = self.component_alphas(&x);
        let nf = self.s.filled.len();
        for s in 0..self.p.c {
            x[nf + s] = xi_of_alpha(&self.block(&comp, s))?;
        }
        Ok(x)
    }

    /// Angle of every component (0-based index).
    pub fn component_alphas(&self, x: &[C]) -> Vec<C> {
        let mut a = vec![C::new(0.0, 0.0); self.p.n];
        for (k, &i) in self.s.filled.iter().enumerate() {
            a[i] = x[k];
        }
        for (k, &j) in self.unfilled.iter().enumerate() {
            a[j] = C::new(self.cone.alpha_j[k], 0.0);
        }
        a
    }

    fn block(&self, comp: &[C], s: usize) -> [C; 6] {
        self.p.block_values(s, comp)
    }

    fn xi(&self, x: &[C], s: usize) -> C {
        x[self.s.filled.len() + s]
    }

    /// Checks that every block stays in the admissible region.
    pub fn check_domain(&self, x: &[C]) -> Result<()> {
        let comp = self.component_alphas(x);
        for s in 0..self.p.c {
            check_domain(&self.block(&comp, s), self.xi(x, s))?;
        }
        Ok(())
    }

    pub fn value(&self, x: &[C]) -> Result<C> {
        let comp = self.component_alphas(x);
        let pi = C::new(PI, 0.0);
        let mut g = C::new(0.0, 0.0);
        for (k, &i) in self.s.filled.iter().enumerate() {
            let (pk, qk) = self.s.slopes[k];
            let pp = self.s.dual[k].p_prime as f64;
            let (pk, qk) = (pk as f64, qk as f64);
            let b = self.cone.beta[k] - PI;
            let a = comp[i] - pi;
            let a0 = self.p.framing[i] as f64;
            let e = self.e[k] as f64;
            g -= (pp / qk + a0) * b * b + (pk * a * a + 2.0 * e * b * a) / qk;
        }
        for (k, &j) in self.unfilled.iter().enumerate() {
            let a = self.cone.alpha_j[k] - PI;
            g -= self.p.framing[j] as f64 * a * a;
        }
        let mut iota_sum = 0.0;
        for (k, a) in comp.iter().enumerate() {
            let iota = self.p.iota[k] as f64;
            g -= 0.5 * iota * (a - pi) * (a - pi);
            iota_sum += 0.5 * iota;
        }
        g += iota_sum * PI * PI;
        for s in 0..self.p.c {
            g += potential_u_unchecked(&self.block(&comp, s), self.xi(x, s))?;
        }
        Ok(g)
    }

    /// Analytic gradient.
    pub fn gradient(&self, x: &[C]) -> Vec<C> {
        let comp = self.component_alphas(x);
        let nf = self.s.filled.len();
        let mut g = vec![C::new(0.0, 0.0); self.dim()];
        let mut by_comp = vec![C::new(0.0, 0.0); self.p.n];
        for s in 0..self.p.c {
            let a = self.block(&comp, s);
            let xi = self.xi(x, s);
            for (slot, d) in du_dalpha(&a, xi).into_iter().enumerate() {
                by_comp[self.p.incidence[s][slot] - 1] += d;
            }
            g[nf + s] = du_dxi(&a, xi);
        }
        for (k, &i) in self.s.filled.iter().enumerate() {
            let (pk, qk) = self.s.slopes[k];
            let a = comp[i] - PI;
            let b = self.cone.beta[k] - PI;
            let e = self.e[k] as f64;
            g[k] = by_comp[i] - (2.0 * pk as f64 * a + 2.0 * e * b) / qk as f64 - self.p.iota[i] as f64 * a;
        }
        g
    }

    /// Hessian by central differences of the analytic gradient, symmetrized.
    pub fn hessian(&self, x: &[C], step: f64) -> DMatrix<C> {
        let d = self.dim();
        let mut h = DMatrix::from_element(d, d, C::new(0.0, 0.0));
        for k in 0..d {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += step;
            xm[k] -= step;
            let (gp, gm) = (self.gradient(&xp), self.gradient(&xm));
            for j in 0..d {
                h[(j, k)] = (gp[j] - gm[j]) / (2.0 * step);
            }
        }
        (&h + h.transpose()) * C::new(0.5, 0.0)
    }

    pub fn presentation(&self) -> &FslPresentation {
        self.p
    }

    pub fn surgery(&self) -> &SurgeryPresentation {
        self.s
    }

    pub fn signs(&self) -> &[i8] {
        &self.e
    }

    pub fn cone(&self) -> &ConeData {
        &self.cone
    }

    pub fn unfilled(&self) -> &[usize] {
        &self.unfilled
    }
}

fn max_norm(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// The critical point of `G^E` together with the cone-structure data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricSolution {
    /// `α_i*` on filled components (order of `s.filled`).
    pub alpha_star: Vec<C>,
    /// `ξ_s*` per block.
    pub xi_star: Vec<C>,
    pub critical_value: C,
    pub vol: f64,
    /// Chern-Simons representative in `[0, π²)`.
    pub cs: f64,
    /// `2cπ² - Re(critical value)` before reduction.
    pub cs_raw: f64,
    /// Logarithmic holonomies of meridians, longitudes and framing curves per component.
    pub h_u: Vec<C>,
    pub h_v: Vec<C>,
    pub h_gamma: Vec<C>,
    /// `l_k` with `H(v_k) = -l_k + ι_k H(u_k)/2`; real geodesic lengths on unfilled components.
    pub lengths: Vec<C>,
    /// Cone angles `θ_k` and signs `μ_k` per component (from `β_i` and `α_j`).
    pub theta: Vec<f64>,
    pub mu: Vec<i8>,
    pub e: Vec<i8>,
    /// Hessian of `G^E` at the critical point, row-major.
    pub hessian: Vec<Vec<C>>,
    /// `∂²U/∂ξ²` per block at the critical point.
    pub d2u_dxi2: Vec<C>,
    pub converged: bool,
    /// `max |∇G^E|` at the returned point.
    pub residual: f64,
    /// `max_i |p_i H(u_i) + q_i H(v_i) - iθ_i|` with `H(v_i)` from the potential.
    pub filling_residual: f64,
    pub iterations: usize,
}

impl GeometricSolution {
    pub fn hessian_matrix(&self) -> DMatrix<C> {
        let d = self.hessian.len();
        DMatrix::from_fn(d, d, |i, j| self.hessian[i][j])
    }
}

/// Sign `σ_k` with `α_k = π + σ_k (i/2) H(u_k)`, and `μ_k`, `θ_k`.
pub(crate) struct Orientation {
    pub sigma: Vec<f64>,
    pub mu: Vec<i8>,
    pub theta: Vec<f64>,
}

pub(crate) fn orientation(g: &SystemPotential) -> Orientation {
    let n = g.p.n;
    let mut o = Orientation { sigma: vec![0.0; n], mu: vec![0; n], theta: vec![0.0; n] };
    let sign = |d: f64| if d >= 0.0 { 1i8 } else { -1 };
    for (k, &i) in g.s.filled.iter().enumerate() {
        let d = g.cone.beta[k] - PI;
        o.mu[i] = sign(d);
        o.theta[i] = 2.0 * d.abs();
        o.sigma[i] = (g.e[k] * o.mu[i]) as f64;
    }
    for (k, &j) in g.unfilled.iter().enumerate() {
        let d = g.cone.alpha_j[k] - PI;
        o.mu[j] = sign(d);
        o.theta[j] = 2.0 * d.abs();
        o.sigma[j] = -(o.mu[j] as f64);
    }
    o
}

/// `H(v_k) = iσ_k ∂𝒰/∂α_k` for every component, with `ξ_s` solved per block.
///
/// `𝒰 = -Σ ι_k(α_k - π)²/2 + Σ_s W(α_s) + const`, and `∂W/∂α = ∂U/∂α` at `ξ(α)`.
pub(crate) fn longitudes_from_alphas(
    p: &FslPresentation,
    sigma: &[f64],
    comp: &[C],
    xi: Option<&[C]>,
) -> Result<Vec<C>> {
    let mut d = vec![C::new(0.0, 0.0); p.n];
    for s in 0..p.c {
        let a = p.block_values(s, comp);
        let x = match xi {
            Some(v) => v[s],
            None => xi_of_alpha(&a)?,
        };
        for (slot, g) in du_dalpha(&a, x).into_iter().enumerate() {
            d[p.incidence[s][slot] - 1] += g;
        }
    }
    Ok((0..p.n).map(|k| I * sigma[k] * (d[k] - p.iota[k] as f64 * (comp[k] - PI))).collect())
}

/// Damped Newton iteration on `∇G^E = 0` from the complete structure.
pub fn find_critical_point(g: &SystemPotential, opts: &SolverOptions) -> Result<GeometricSolution> {
    let offset = g.cone.max_offset();
    if offset > opts.gate && !opts.force {
        return Err(Error::OutsideSmallAngleRegime { angle: offset, limit: opts.gate });
    }
    let d = g.dim();
    let mut x = g.starting_point()?;
    let mut grad = g.gradient(&x);
    let mut res = max_norm(&grad);
    let mut iterations = 0;
    while res >= opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let h = g.hessian(&x, opts.hessian_step);
        let rhs = DVector::from_vec(grad.clone());
        let step = h.lu().solve(&rhs).ok_or_else(|| {
            Error::Degenerate(
                "Hessian of the system potential is singular; the small-angle regime guaranteeing \
                 non-singularity has been left"
                    .into(),
            )
        })?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<C> = (0..d).map(|k| x[k] - step[k] * lambda).collect();
            if g.check_domain(&trial).is_ok() {
                let gt = g.gradient(&trial);
                let rt = max_norm(&gt);
                if rt < res || lambda < 1e-3 {
                    x = trial;
                    grad = gt;
                    res = rt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Err(Error::SolverFailed(format!(
                    "Newton step left the admissible region at iteration {iterations} (residual {res:e})"
                )));
            }
        }
    }
    if res >= opts.tol.max(1e-10) {
        return Err(Error::SolverFailed(format!(
            "critical point not found after {iterations} iterations (residual {res:e})"
        )));
    }
    assemble(g, x, res, iterations, opts)
}

fn assemble(
    g: &SystemPotential,
    x: Vec<C>,
    residual: f64,
    iterations: usize,
    opts: &SolverOptions,
) -> Result<GeometricSolution> {
    let p = g.p;
    let nf = g.s.filled.len();
    let comp = g.component_alphas(&x);
    let o = orientation(g);
    let value = g.value(&x)?;
    let xi_star: Vec<C> = x[nf..].to_vec();

    let mut h_u = vec![C::new(0.0, 0.0); p.n];
    for (k, a) in comp.iter().enumerate() {
        h_u[k] = -2.0 * I * o.sigma[k] * (a - PI);
    }
    for &j in &g.unfilled {
        h_u[j] = I * o.theta[j];
    }
    let h_v_pot = longitudes_from_alphas(p, &o.sigma, &comp, Some(&xi_star))?;
    let mut h_v = h_v_pot.clone();
    let mut h_gamma = vec![C::new(0.0, 0.0); p.n];
    let mut filling_residual: f64 = 0.0;
    for (k, &i) in g.s.filled.iter().enumerate() {
        let (pk, qk) = g.s.slopes[k];
        let (pk, qk) = (pk as f64, qk as f64);
        let it = I * o.theta[i];
        h_v[i] = (it - pk * h_u[i]) / qk;
        filling_residual = filling_residual.max((pk * h_u[i] + qk * h_v_pot[i] - it).norm());
        let pp = g.s.dual[k].p_prime as f64;
        h_gamma[i] = -h_u[i] / qk + (pp / qk + p.framing[i] as f64) * it;
    }
    for &j in &g.unfilled {
        h_gamma[j] = p.framing[j] as f64 * h_u[j] + h_v[j];
    }
    let lengths: Vec<C> = (0..p.n).map(|k| -h_v[k] + 0.5 * p.iota[k] as f64 * h_u[k]).collect();

    let hess = g.hessian(&x, opts.hessian_step);
    let d2: Vec<C> = (0..p.c).map(|s| d2u_dxi2(&g.block(&comp, s), xi_star[s])).collect();
    let two_c_pi2 = 2.0 * p.c as f64 * PI * PI;
    let cs_raw = two_c_pi2 - value.re;
    Ok(GeometricSolution {
        alpha_star: x[..nf].to_vec(),
        xi_star,
        critical_value: value,
        vol: value.im,
        cs: cs_raw.rem_euclid(PI * PI),
        cs_raw,
        h_u,
        h_v,
        h_gamma,
        lengths,
        theta: o.theta,
        mu: o.mu,
        e: g.e.clone(),
        hessian: (0..hess.nrows()).map(|i| (0..hess.ncols()).map(|j| hess[(i, j)]).collect()).collect(),
        d2u_dxi2: d2,
        converged: true,
        residual,
        filling_residual,
        iterations,
    })
}

/// Edge lengths per component from finite differences of `W` on each block,
/// `l_k = -iσ_k Σ_{slots of k} ∂W/∂α_slot`.
pub fn edge_lengths(g: &SystemPotential, sol: &GeometricSolution) -> Result<Vec<C>> {
    use super::potential::potential_w;
    let p = g.p;
    let o = orientation(g);
    let mut x = sol.alpha_star.clone();
    x.extend(&sol.xi_star);
    let comp = g.component_alphas(&x);
    let h = 1e-5;
    let mut l = vec![C::new(0.0, 0.0); p.n];
    for s in 0..p.c {
        let a = g.block(&comp, s);
        for slot in 0..6 {
            let (mut ap, mut am) = (a, a);
            ap[slot] += h;
            am[slot] -= h;
            let dw = (potential_w(&ap)? - potential_w(&am)?) / (2.0 * h);
            let k = p.incidence[s][slot] - 1;
            l[k] += -I * o.sigma[k] * dw;
        }
    }
    Ok(l)
}
