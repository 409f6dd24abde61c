//! Negative continued fractions and the dual slope.

use crate::{Error, Result};
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

type Q = Ratio<i128>;

/// `p/q = a_ζ - 1/(a_{ζ-1} - 1/(... - 1/a_1))`, returned as `(a_1, ..., a_ζ)`.
///
/// For `p/q > 1` every `a_l >= 2` (ceiling algorithm); for `p/q < -1` the
/// expansion is the negation of that of `-p/q`. Slopes with `|p/q| <= 1`
/// admit neither form and are rejected.
pub fn neg_cf(p: i64, q: i64) -> Result<Vec<i64>> {
    if q < 1 || p.gcd(&q) != 1 || p.abs() <= q {
        return Err(Error::UnsupportedSlope { p, q });
    }
    if p < 0 {
        return Ok(neg_cf(-p, q)?.into_iter().map(|a| -a).collect());
    }
    let (mut num, mut den) = (p as i128, q as i128);
    let mut rev = Vec::new();
    while den != 0 {
        let a = Integer::div_ceil(&num, &den);
        rev.push(a as i64);
        // num/den = a - den/(a den - num)
        (num, den) = (den, a * den - num);
    }
    rev.reverse();
    Ok(rev)
}

/// Evaluates `a_ζ - 1/(a_{ζ-1} - ... - 1/a_1)` exactly.
pub fn eval_cf(a: &[i64]) -> Ratio<i128> {
    partials_b(a).last().copied().unwrap_or_else(|| Q::from_integer(0))
}

/// `b_l = a_l - 1/b_{l-1}` with `b_1 = a_1`.
fn partials_b(a: &[i64]) -> Vec<Q> {
    let mut b: Vec<Q> = Vec::with_capacity(a.len());
    for &al in a {
        let v = match b.last() {
            None => Q::from_integer(al as i128),
            Some(prev) => Q::from_integer(al as i128) - prev.recip(),
        };
        b.push(v);
    }
    b
}

/// Partial quotients `b_l` and products `c_l = b_1 ⋯ b_l` (with `c_0 = 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partials {
    pub b: Vec<Ratio<i128>>,
    /// `c[0] = 1`, `c[l] = b_1 ⋯ b_l` for `l = 1..=ζ`.
    pub c: Vec<Ratio<i128>>,
}

pub fn partials(a: &[i64]) -> Partials {
    let b = partials_b(a);
    let mut c = vec![Q::from_integer(1)];
    for bl in &b {
        let next = *c.last().expect("c_0 present") * bl;
        c.push(next);
    }
    Partials { b, c }
}

/// Integers with `p p' + q q' = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualSlope {
    pub p_prime: i64,
    pub q_prime: i64,
}

/// The dual slope with `p' ∈ (-q, 0]` for `p > 0` and `p' ∈ [0, q)` for `p < 0`.
///
/// These are the ranges in which `Σ_{j=1}^{ζ-1} 1/(c_j c_{j-1}) = -p'/q`
/// holds for the negative continued fraction; when the expansion exists the
/// identity is asserted in exact arithmetic.
pub fn dual_slope(p: i64, q: i64) -> Result<DualSlope> {
    if q < 1 || p.gcd(&q) != 1 {
        return Err(Error::UnsupportedSlope { p, q });
    }
    let (pp, qq) = (p as i128, q as i128);
    let e = pp.extended_gcd(&qq);
    let x0 = (e.x * e.gcd.signum()).rem_euclid(qq);
    let x = if p > 0 && x0 != 0 { x0 - qq } else { x0 };
    let y = (1 - pp * x) / qq;
    let d = DualSlope { p_prime: x as i64, q_prime: y as i64 };
    if let Ok(a) = neg_cf(p, q) {
        assert_eq!(
            reciprocal_product_sum(&a),
            Q::new(-x, qq),
            "continued-fraction identity failed for {p}/{q}"
        );
    }
    Ok(d)
}

/// `Σ_{j=1}^{ζ-1} 1/(c_j c_{j-1})` from the expansion.
pub fn reciprocal_product_sum(a: &[i64]) -> Ratio<i128> {
    let c = partials(a).c;
    (1..a.len()).map(|j| (c[j] * c[j - 1]).recip()).sum()
}
