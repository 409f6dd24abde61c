//! Rational Dehn fillings: continued fractions, the dual slope, and the
//! invariant of the filled pair as a finite coloring sum.
//!
//! Each filled component `i` with slope `p_i/q_i = [a_1, ..., a_ζ]` is replaced
//! by a chain of `ζ` integrally framed unknots. The chain colors enter the sum
//! only through nearest-neighbour factors `{(m_l + 1)(m_{l+1} + 1)}` and framing
//! phases, so the inner chain sums are contracted with transfer matrices and
//! only the last chain color `m_ζ` (which colors the 6j-symbols) is summed
//! explicitly.

mod cf;

pub use cf::{dual_slope, eval_cf, neg_cf, partials, reciprocal_product_sum, DualSlope, Partials};

use crate::fsl::{block_product, check_coloring, Finding, FslPresentation};
use crate::qarith::{par_log_sum, LogComplex, Precision, RootContext};
use crate::sixj::SixjEvaluator;
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Surgery data with derived continued-fraction quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurgeryPresentation {
    /// 0-based filled component indices (the set I).
    pub filled: Vec<usize>,
    /// `(p_i, q_i)` per filled component.
    pub slopes: Vec<(i64, i64)>,
    /// Negative continued fraction `(a_1, ..., a_ζ)` per filled component.
    pub cf: Vec<Vec<i64>>,
    pub dual: Vec<DualSlope>,
    /// Non-fatal findings such as even denominators.
    pub warnings: Vec<Finding>,
}

impl SurgeryPresentation {
    /// Derives the surgery data from a validated presentation.
    pub fn from_presentation(p: &FslPresentation) -> Result<Self> {
        p.ensure_valid()?;
        let (filled, slopes) = p.filled();
        let mut out = SurgeryPresentation {
            filled: filled.iter().map(|i| i - 1).collect(),
            slopes: slopes.iter().map(|s| (s[0], s[1])).collect(),
            cf: Vec::new(),
            dual: Vec::new(),
            warnings: p.validate().into_iter().filter(Finding::is_warning).collect(),
        };
        for &(pi, qi) in &out.slopes {
            out.cf.push(neg_cf(pi, qi)?);
            out.dual.push(dual_slope(pi, qi)?);
        }
        Ok(out)
    }

    /// Empty surgery (I = ∅).
    pub fn empty() -> Self {
        SurgeryPresentation { filled: vec![], slopes: vec![], cf: vec![], dual: vec![], warnings: vec![] }
    }

    /// Unfilled component indices (the set J), 0-based and increasing.
    pub fn unfilled(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|i| !self.filled.contains(i)).collect()
    }

    /// `Σ_i ζ_i`.
    pub fn total_length(&self) -> usize {
        self.cf.iter().map(Vec::len).sum()
    }
}

/// Value of the filled invariant with the findings attached to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilledValue {
    pub value: LogComplex,
    pub warnings: Vec<Finding>,
}

/// `exp(-σ(-3/r - (r+1)/4) iπ)` with the exponent reduced exactly.
pub fn signature_phase(r: u32, sigma: i64) -> LogComplex {
    // σ(12 + r(r+1)) / (4r) in units of π, reduced mod 2.
    let r = r as i128;
    let num = (sigma as i128 * (12 + r * (r + 1))).rem_euclid(8 * r);
    LogComplex::unit(PI * num as f64 / (4 * r) as f64)
}

/// Sums over the first `ζ - 1` chain colors, leaving a function of `m_ζ`:
/// `Σ {(n+1)(m_1+1)} q^{a_1 m_1(m_1+2)/2} {(m_1+1)(m_2+1)} ⋯ {(m_{ζ-1}+1)(m_ζ+1)}`.
fn chain_vector(ctx: &RootContext, n: u32, a: &[i64]) -> Vec<Complex64> {
    let colors: Vec<u32> = ctx.colors().collect();
    let link = |x: u32, y: u32| ctx.brace((x as i64 + 1) * (y as i64 + 1));
    let mut f: Vec<Complex64> = colors.iter().map(|&m| link(n, m)).collect();
    for &al in &a[..a.len() - 1] {
        let weighted: Vec<Complex64> = colors
            .iter()
            .zip(&f)
            .map(|(&m, &v)| v * ctx.q_pow(al * (m * (m + 2)) as i64, 2).to_complex())
            .collect();
        f = colors
            .iter()
            .map(|&m2| colors.iter().zip(&weighted).map(|(&m1, &w)| w * link(m1, m2)).sum())
            .collect();
    }
    f
}

/// Relative RT invariant of the filled pair, colored by `n_i` on the filled
/// components (order of `s.filled`) and `m_j` on the others (increasing index).
///
/// The outer sum over last chain colors runs in parallel and is reduced with
/// a fixed pairwise tree, so results do not depend on the thread count.
pub fn rt_filled(
    ctx: &RootContext,
    p: &FslPresentation,
    s: &SurgeryPresentation,
    n_i: &[u32],
    m_j: &[u32],
    eval: &dyn SixjEvaluator,
    precision: Precision,
) -> Result<FilledValue> {
    p.ensure_valid()?;
    let unfilled = s.unfilled(p.n);
    if n_i.len() != s.filled.len() || m_j.len() != unfilled.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} filled and {} unfilled colors",
            s.filled.len(),
            unfilled.len()
        )));
    }
    check_coloring(ctx, n_i)?;
    check_coloring(ctx, m_j)?;

    let zeta = s.total_length() as i32;
    let brace1 = LogComplex::from_complex(ctx.brace(1));
    let mut pre = LogComplex::from_real(ctx.mu()).powi(zeta - p.c as i32) * brace1.powi(-zeta);
    pre = pre * signature_phase(ctx.r(), p.signature_hint);
    for (k, &i) in s.filled.iter().enumerate() {
        let n = n_i[k] as i64;
        pre = pre * ctx.q_pow(p.framing[i] * n * (n + 2), 2);
    }
    for (k, &j) in unfilled.iter().enumerate() {
        pre = pre * p.framing_phase(ctx, j, p.framing[j], m_j[k]);
    }

    let colors: Vec<u32> = ctx.colors().collect();
    // Chain weight as a function of the last chain color, per filled component.
    let weights: Vec<Vec<LogComplex>> = s
        .filled
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            let a = &s.cf[k];
            let last = *a.last().expect("nonempty expansion");
            chain_vector(ctx, n_i[k], a)
                .into_iter()
                .zip(&colors)
                .map(|(v, &m)| LogComplex::from_complex(v) * p.framing_phase(ctx, i, last, m))
                .collect()
        })
        .collect();

    let base = colors.len();
    let count = base.pow(s.filled.len() as u32);
    let terms: Vec<LogComplex> = (0..count)
        .into_par_iter()
        .map(|mut idx| {
            let mut comp = vec![0u32; p.n];
            for (k, &j) in unfilled.iter().enumerate() {
                comp[j] = m_j[k];
            }
            let mut w = LogComplex::ONE;
            for (k, &i) in s.filled.iter().enumerate() {
                let c = idx % base;
                idx /= base;
                comp[i] = colors[c];
                w = w * weights[k][c];
            }
            if w.is_zero() {
                return Ok(LogComplex::ZERO);
            }
            Ok(w * block_product(p, ctx, &comp, eval)?)
        })
        .collect::<Result<_>>()?;
    Ok(FilledValue { value: pre * par_log_sum(&terms, precision), warnings: s.warnings.clone() })
}
