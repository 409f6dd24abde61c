//! Adjoint twisted Reidemeister torsion of the link complement from Gram
//! matrices and the change-of-curves Jacobian, with identity checks linking
//! it to the Hessian of the system potential.

use super::potential::d2u_dxi2;
use super::system::{longitudes_from_alphas, orientation, GeometricSolution, SystemPotential};
use super::tetra::{gram_det, tau};
use crate::specfun::log_one_minus_exp2i;
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Step in each `H(u_j)` for the Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-4;

/// Both sides of an identity that holds up to sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: C,
    pub rhs: C,
    /// `min(|lhs - rhs|, |lhs + rhs|) / |rhs|`.
    pub rel_err: f64,
}

impl IdentityCheck {
    fn new(lhs: C, rhs: C) -> Self {
        let err = (lhs - rhs).norm().min((lhs + rhs).norm());
        IdentityCheck { lhs, rhs, rel_err: err / rhs.norm() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionReport {
    /// Torsion for the system `Υ_i = p_i u_i + q_i v_i` (i ∈ I), `Υ_j = u_j`, up to sign.
    pub torsion: C,
    /// Torsion for the meridian system, `2^{3c} ∏ √det 𝔾_s`, up to sign.
    pub torsion_meridians: C,
    /// `∂H(Υ_a)/∂H(u_b)`, row-major.
    pub jacobian: Vec<Vec<C>>,
    pub jacobian_det: C,
    /// `det 𝔾(H(u_{s_1})/2, …, H(u_{s_6})/2)` and the chosen square roots.
    pub gram_dets: Vec<C>,
    pub sqrt_gram_dets: Vec<C>,
    /// `-(∏q) det Hess G = -(-2)^{|I|} det(∂H(Υ)/∂H(u))_{I×I} ∏ ∂²U/∂ξ_s²`.
    pub hessian_identity: IdentityCheck,
    /// Per block: `e^{-iΣα + 4iξ - Σ log(1 - e^{2i(ξ - τ)})} / ∂²U/∂ξ² = -1/(16 √det 𝔾)`.
    pub gram_identities: Vec<IdentityCheck>,
}

/// Square root on the branch through `4i = √det 𝔾(0)` at the complete structure.
fn sqrt_near_complete(d: C) -> C {
    let s = d.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// `H(v)` as a function of `H(u)` on the deformation space, re-solving `ξ`
/// on every block.
fn longitudes_of_meridians(g: &SystemPotential, sigma: &[f64], h_u: &[C]) -> Result<Vec<C>> {
    let comp: Vec<C> = h_u.iter().zip(sigma).map(|(h, s)| PI + s * 0.5 * I * h).collect();
    longitudes_from_alphas(g.presentation(), sigma, &comp, None)
}

/// Torsion and diagnostics at a converged solution.
pub fn torsion(g: &SystemPotential, sol: &GeometricSolution) -> Result<TorsionReport> {
    let p = g.presentation();
    let s = g.surgery();
    let n = p.n;
    let o = orientation(g);

    // Columns of ∂H(v)/∂H(u) by central differences, in parallel.
    let columns: Vec<Vec<C>> = (0..n)
        .into_par_iter()
        .map(|b| {
            let mut up = sol.h_u.clone();
            let mut um = sol.h_u.clone();
            up[b] += JACOBIAN_STEP;
            um[b] -= JACOBIAN_STEP;
            let vp = longitudes_of_meridians(g, &o.sigma, &up)?;
            let vm = longitudes_of_meridians(g, &o.sigma, &um)?;
            Ok(vp.iter().zip(&vm).map(|(a, b)| (a - b) / (2.0 * JACOBIAN_STEP)).collect())
        })
        .collect::<Result<_>>()?;
    let mut jac = DMatrix::<C>::identity(n, n);
    for (k, &i) in s.filled.iter().enumerate() {
        let (pk, qk) = s.slopes[k];
        for b in 0..n {
            let unit = if b == i { pk as f64 } else { 0.0 };
            jac[(i, b)] = C::new(unit, 0.0) + qk as f64 * columns[b][i];
        }
    }
    let jacobian_det = jac.determinant();

    let gram_dets: Vec<C> =
        (0..p.c).map(|b| gram_det(&p.block_values(b, &sol.h_u).map(|h| h * 0.5))).collect();
    let sqrt_gram_dets: Vec<C> = gram_dets.iter().map(|&d| sqrt_near_complete(d)).collect();
    let prod: C = sqrt_gram_dets.iter().product();
    let scale = 2f64.powi(3 * p.c as i32);
    let torsion_meridians = scale * prod;
    let torsion = torsion_meridians * jacobian_det;

    // Hessian identity on the filled block of the Jacobian.
    let nf = s.filled.len();
    let hess = sol.hessian_matrix();
    let q_prod: f64 = s.slopes.iter().map(|&(_, q)| q as f64).product();
    let lhs = -q_prod * hess.determinant();
    let sub = DMatrix::from_fn(nf, nf, |a, b| jac[(s.filled[a], s.filled[b])]);
    let d2_prod: C = sol.d2u_dxi2.iter().product();
    let rhs = -(-2f64).powi(nf as i32) * sub.determinant() * d2_prod;
    let hessian_identity = IdentityCheck::new(lhs, rhs);

    let mut x = sol.alpha_star.clone();
    x.extend(&sol.xi_star);
    let comp = g.component_alphas(&x);
    let gram_identities = (0..p.c)
        .map(|b| {
            let a = p.block_values(b, &comp);
            let xi = sol.xi_star[b];
            let mut expo = 4.0 * I * xi - I * a.iter().sum::<C>();
            for t in tau(&a) {
                expo -= log_one_minus_exp2i(xi - t);
            }
            let lhs = expo.exp() / d2u_dxi2(&a, xi);
            let rhs = -1.0 / (16.0 * sqrt_gram_dets[b]);
            IdentityCheck::new(lhs, rhs)
        })
        .collect();

    if !torsion.is_finite() {
        return Err(Error::Degenerate(format!("non-finite torsion {torsion}")));
    }
    Ok(TorsionReport {
        torsion,
        torsion_meridians,
        jacobian: (0..n).map(|a| (0..n).map(|b| jac[(a, b)]).collect()).collect(),
        jacobian_det,
        gram_dets,
        sqrt_gram_dets,
        hessian_identity,
        gram_identities,
    })
}
