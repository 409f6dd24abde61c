//! Quantum 6j-symbols at `q = exp(2πi/r)`.
//!
//! Two evaluators are provided behind [`SixjEvaluator`]:
//! - `"sum"`: the defining finite sum of quantum factorials ([`sixj`]);
//! - `"dilog"`: the representation as a sum of `exp(r/(4πi) U_r)` built from
//!   the quantum dilogarithm ([`sixj_via_ur`]).
//!
//! [`CachedEvaluator`] wraps either with a bounded LRU keyed by the symmetry
//! orbit of the colors.

mod growth;

pub use growth::{growth_colors, sixj_growth, GrowthPoint, GrowthSequence};

use crate::geometry::tetra::{orbit_representative, QUADS, TRIANGLES};
use crate::qarith::{log_sum, LogComplex, Precision, RootContext};
use crate::registry::{Named, Registry};
use crate::specfun::{ContourSpec, PhiTable};
use crate::{Error, Result};
use lru::LruCache;
use num_complex::Complex64;
use parking_lot::Mutex;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Six edge colors of a building block.
pub type Colors6 = [u32; 6];

/// Default LRU capacity for cached 6j values.
pub const DEFAULT_CACHE_CAPACITY: usize = 1 << 20;

/// r-admissibility of a triple of colors (all even, in `[0, r-3]`).
pub fn triple_admissible(r: u32, a: u32, b: u32, c: u32) -> bool {
    let (a, b, c, r) = (a as i64, b as i64, c as i64, r as i64);
    let in_range = |x: i64| x % 2 == 0 && (0..=r - 3).contains(&x);
    in_range(a)
        && in_range(b)
        && in_range(c)
        && a + b - c >= 0
        && b + c - a >= 0
        && c + a - b >= 0
        && a + b + c <= 2 * (r - 2)
}

/// r-admissibility of a 6-tuple: all four triangle triples admissible.
pub fn is_admissible(r: u32, m: &Colors6) -> bool {
    TRIANGLES.iter().all(|t| triple_admissible(r, m[t[0]], m[t[1]], m[t[2]]))
}

fn check_admissible(ctx: &RootContext, m: &Colors6) -> Result<()> {
    if is_admissible(ctx.r(), m) {
        Ok(())
    } else {
        Err(Error::NotAdmissible(format!("{m:?} at r = {}", ctx.r())))
    }
}

fn half_sums(m: &Colors6) -> ([i64; 4], [i64; 3]) {
    let t = TRIANGLES.map(|t| (m[t[0]] + m[t[1]] + m[t[2]]) as i64 / 2);
    let q = QUADS.map(|q| (m[q[0]] + m[q[1]] + m[q[2]] + m[q[3]]) as i64 / 2);
    (t, q)
}

/// Summation range `max T_i ..= min(Q_j, r-2)` (possibly empty).
fn k_range(r: u32, t: &[i64; 4], q: &[i64; 3]) -> std::ops::RangeInclusive<i64> {
    let lo = *t.iter().max().expect("four triangles");
    let hi = (*q.iter().min().expect("three quads")).min(r as i64 - 2);
    lo..=hi
}

/// `Δ(a, b, c) = sqrt([(a+b-c)/2]! [(b+c-a)/2]! [(c+a-b)/2]! / [(a+b+c)/2 + 1]!)`,
/// with `sqrt(x) = i sqrt(|x|)` for a negative radicand.
pub fn delta(ctx: &RootContext, a: u32, b: u32, c: u32) -> Result<LogComplex> {
    if !triple_admissible(ctx.r(), a, b, c) {
        return Err(Error::NotAdmissible(format!("({a}, {b}, {c}) at r = {}", ctx.r())));
    }
    Ok(delta_unchecked(ctx, a, b, c))
}

fn delta_unchecked(ctx: &RootContext, a: u32, b: u32, c: u32) -> LogComplex {
    let parts = [
        ctx.qfact_parts((a + b - c) / 2),
        ctx.qfact_parts((b + c - a) / 2),
        ctx.qfact_parts((c + a - b) / 2),
    ];
    let den = ctx.qfact_parts((a + b + c) / 2 + 1);
    let sign: i8 = parts.iter().map(|p| p.1).product::<i8>() * den.1;
    let log_mag = 0.5 * (parts.iter().map(|p| p.0).sum::<f64>() - den.0);
    LogComplex::new(log_mag, if sign < 0 { 0.5 * PI } else { 0.0 })
}

/// Product of the four Δ factors and the `i^{-Σm}` prefactor.
fn delta_prefactor(ctx: &RootContext, m: &Colors6) -> LogComplex {
    let total: u32 = m.iter().sum();
    let mut acc = LogComplex::unit(-0.5 * PI * total as f64);
    for t in &TRIANGLES {
        acc = acc * delta_unchecked(ctx, m[t[0]], m[t[1]], m[t[2]]);
    }
    acc
}

fn sixj_definitional(ctx: &RootContext, m: &Colors6, precision: Precision) -> LogComplex {
    let (t, q) = half_sums(m);
    let terms: Vec<LogComplex> = k_range(ctx.r(), &t, &q)
        .map(|k| {
            let (mut l, mut s) = ctx.qfact_parts((k + 1) as u32);
            if k % 2 != 0 {
                s = -s;
            }
            for ti in &t {
                let (lv, sv) = ctx.qfact_parts((k - ti) as u32);
                l -= lv;
                s *= sv;
            }
            for qj in &q {
                let (lv, sv) = ctx.qfact_parts((qj - k) as u32);
                l -= lv;
                s *= sv;
            }
            LogComplex::new(l, if s < 0 { PI } else { 0.0 })
        })
        .collect();
    let sum = log_sum(&terms, precision);
    delta_prefactor(ctx, m) * sum
}

/// Quantum 6j-symbol by its defining sum; errors on inadmissible colors.
///
/// The value is computed on the orbit representative, so it is exactly
/// invariant under the tetrahedral symmetries of the colors.
pub fn sixj(ctx: &RootContext, m: Colors6) -> Result<LogComplex> {
    check_admissible(ctx, &m)?;
    Ok(sixj_definitional(ctx, &orbit_representative(m), Precision::Double))
}

/// Like [`sixj`] but returns exact zero for inadmissible colors.
pub fn sixj_lenient(ctx: &RootContext, m: Colors6) -> LogComplex {
    sixj(ctx, m).unwrap_or(LogComplex::ZERO)
}

/// Result of the quantum-dilogarithm evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrValue {
    pub value: LogComplex,
    /// True when the colors are not of hyperideal type and the defining sum was used.
    pub fallback: bool,
}

/// `U_r(2πm/r, 2πk/r)` with φ_r values read from `table` at multiples of π/r.
fn u_r(table: &PhiTable, m: &Colors6, k: i64) -> Result<Complex64> {
    let r = table.r() as i64;
    let (t, q) = half_sums(m);
    let unit = TAU / r as f64;
    let tau: Vec<f64> = t.iter().map(|&x| x as f64 * unit).collect();
    let eta: Vec<f64> = q.iter().map(|&x| x as f64 * unit).collect();
    let xi = k as f64 * unit;
    let mut v = PI * PI - unit * unit;
    for ti in &tau {
        for ej in &eta {
            v += 0.5 * (ej - ti).powi(2);
        }
        v -= 0.5 * (ti + unit - PI).powi(2);
        v -= (xi - ti).powi(2);
    }
    v += (xi + unit - PI).powi(2);
    for ej in &eta {
        v -= (ej - xi).powi(2);
    }
    let mut u = Complex64::new(v, 0.0);
    u -= 2.0 * table.get(1)?;
    for ti in &t {
        for qj in &q {
            u -= 0.5 * table.get(2 * (qj - ti) + 1)?;
        }
        u += 0.5 * table.get(2 * ti - r + 3)?;
        u += table.get(2 * (k - ti) + 1)?;
    }
    u -= table.get(2 * k - r + 3)?;
    for qj in &q {
        u += table.get(2 * (qj - k) + 1)?;
    }
    Ok(u)
}

/// Colors of hyperideal type: every triangle triple satisfies
/// `m_i + m_j - m_k <= r-2` and `m_i + m_j + m_k >= r-2`.
///
/// These are exactly the tuples for which every φ_r argument of `U_r` with a
/// half-integer coefficient lies in the fundamental strip.
pub fn is_hyperideal_colors(r: u32, m: &Colors6) -> bool {
    let r2 = r as i64 - 2;
    is_admissible(r, m)
        && TRIANGLES.iter().all(|t| {
            let (a, b, c) = (m[t[0]] as i64, m[t[1]] as i64, m[t[2]] as i64);
            (a + b - c).max(b + c - a).max(c + a - b) <= r2 && a + b + c >= r2
        })
}

/// Sign relating the square-root branch produced by `U_r` to the Δ convention.
///
/// For hyperideal colors the radicand of Δ at a triangle has sign
/// `(-1)^(T+1-h)` with `h = (r-1)/2`. The exponential form yields
/// `i^(T+1-h) sqrt|x|` while Δ takes `i^((T+1-h) mod 2) sqrt|x|`; they differ
/// by `-1` when `(T+1-h) mod 4` is 2 or 3.
fn ur_branch_sign(r: u32, t: &[i64; 4]) -> f64 {
    let h = (r as i64 - 1) / 2;
    let flips = t.iter().filter(|&&ti| (ti + 1 - h).rem_euclid(4) >= 2).count();
    if flips % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Quantum 6j-symbol as `(i sin(2π/r)) Σ_k exp(r/(4πi) U_r(2πm/r, 2πk/r))`.
///
/// The prefactor `i sin(2π/r) = {2}/2` makes this agree with [`sixj`], up to
/// the square-root branch sign of [`ur_branch_sign`]. The representation holds
/// for colors of hyperideal type ([`is_hyperideal_colors`]); other colors fall
/// back to the defining sum with `fallback = true`.
pub fn sixj_via_ur(ctx: &RootContext, table: &PhiTable, m: Colors6) -> Result<UrValue> {
    check_admissible(ctx, &m)?;
    if table.r() != ctx.r() {
        return Err(Error::InvalidArgument("phi table built for a different r".into()));
    }
    let m = orbit_representative(m);
    let r = ctx.r();
    if !is_hyperideal_colors(r, &m) {
        return Ok(UrValue { value: sixj_definitional(ctx, &m, Precision::Double), fallback: true });
    }
    let (t, q) = half_sums(&m);
    let scale = Complex64::new(0.0, -(r as f64) / (4.0 * PI));
    let mut terms = Vec::new();
    for k in k_range(r, &t, &q) {
        terms.push(LogComplex::exp(scale * u_r(table, &m, k)?));
    }
    let pre = Complex64::new(0.0, ur_branch_sign(r, &t) * (TAU / r as f64).sin());
    let pre = LogComplex::from_complex(pre);
    Ok(UrValue { value: pre * log_sum(&terms, Precision::Double), fallback: false })
}

/// A way of evaluating quantum 6j-symbols, selectable by name.
pub trait SixjEvaluator: Named + Send + Sync {
    /// Strict evaluation: errors on inadmissible colors.
    fn evaluate(&self, ctx: &RootContext, m: Colors6) -> Result<LogComplex>;

    /// Zero for inadmissible colors, otherwise [`SixjEvaluator::evaluate`].
    fn evaluate_lenient(&self, ctx: &RootContext, m: Colors6) -> Result<LogComplex> {
        if is_admissible(ctx.r(), &m) {
            self.evaluate(ctx, m)
        } else {
            Ok(LogComplex::ZERO)
        }
    }
}

/// The defining sum of quantum factorials.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefinitionalSum {
    pub precision: Precision,
}

impl Named for DefinitionalSum {
    fn name(&self) -> &'static str {
        "sum"
    }
}

impl SixjEvaluator for DefinitionalSum {
    fn evaluate(&self, ctx: &RootContext, m: Colors6) -> Result<LogComplex> {
        check_admissible(ctx, &m)?;
        Ok(sixj_definitional(ctx, &orbit_representative(m), self.precision))
    }
}

/// The quantum-dilogarithm representation, with per-r tables of φ_r values.
#[derive(Debug, Default)]
pub struct QuantumDilog {
    pub contour: ContourSpec,
    tables: Mutex<HashMap<u32, Arc<PhiTable>>>,
    fallbacks: AtomicU64,
}

impl QuantumDilog {
    pub fn new(contour: ContourSpec) -> Self {
        QuantumDilog { contour, tables: Mutex::new(HashMap::new()), fallbacks: AtomicU64::new(0) }
    }

    pub fn table(&self, r: u32) -> Result<Arc<PhiTable>> {
        let mut guard = self.tables.lock();
        if let Some(t) = guard.get(&r) {
            return Ok(t.clone());
        }
        let t = Arc::new(PhiTable::new(r, self.contour)?);
        guard.insert(r, t.clone());
        Ok(t)
    }

    /// Number of evaluations that fell back to the defining sum.
    pub fn fallback_count(&self) -> u64 {
        self.fallbacks.load(Ordering::Relaxed)
    }
}

impl Named for QuantumDilog {
    fn name(&self) -> &'static str {
        "dilog"
    }
}

impl SixjEvaluator for QuantumDilog {
    fn evaluate(&self, ctx: &RootContext, m: Colors6) -> Result<LogComplex> {
        let table = self.table(ctx.r())?;
        let v = sixj_via_ur(ctx, &table, m)?;
        if v.fallback {
            self.fallbacks.fetch_add(1, Ordering::Relaxed);
        }
        Ok(v.value)
    }
}

/// Bounded LRU memoization around another evaluator.
///
/// Keys are `(r, orbit representative)`; values are computed from the
/// representative, so cached and uncached results are bit-identical.
pub struct CachedEvaluator {
    inner: Arc<dyn SixjEvaluator>,
    cache: Mutex<LruCache<(u32, Colors6), LogComplex>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl CachedEvaluator {
    pub fn new(inner: Arc<dyn SixjEvaluator>, capacity: usize) -> Self {
        let cap = NonZeroUsize::new(capacity.max(1)).expect("nonzero");
        CachedEvaluator {
            inner,
            cache: Mutex::new(LruCache::new(cap)),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    pub fn len(&self) -> usize {
        self.cache.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Named for CachedEvaluator {
    fn name(&self) -> &'static str {
        self.inner.name()
    }
}

impl SixjEvaluator for CachedEvaluator {
    fn evaluate(&self, ctx: &RootContext, m: Colors6) -> Result<LogComplex> {
        check_admissible(ctx, &m)?;
        let key = (ctx.r(), orbit_representative(m));
        if let Some(v) = self.cache.lock().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(*v);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let v = self.inner.evaluate(ctx, key.1)?;
        self.cache.lock().put(key, v);
        Ok(v)
    }
}

/// Registry of the built-in evaluators (`"sum"` is the default).
pub fn evaluators(precision: Precision, contour: ContourSpec) -> Registry<dyn SixjEvaluator> {
    let mut reg: Registry<dyn SixjEvaluator> = Registry::new();
    reg.register(Arc::new(DefinitionalSum { precision }));
    reg.register(Arc::new(QuantumDilog::new(contour)));
    reg
}

/// Looks up `name` in the built-in registry and wraps it in an LRU cache.
pub fn cached_evaluator(name: &str, precision: Precision, capacity: usize) -> Result<Arc<dyn SixjEvaluator>> {
    let inner = evaluators(precision, ContourSpec::default()).get(name)?;
    Ok(Arc::new(CachedEvaluator::new(inner, capacity)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_colors_give_one() {
        for r in [5, 7, 101] {
            let ctx = RootContext::new(r).unwrap();
            let v = sixj(&ctx, [0; 6]).unwrap();
            assert!(v.rel_diff(&LogComplex::ONE) < 1e-14);
        }
    }

    #[test]
    fn delta_examples() {
        for r in [5, 7, 11] {
            let ctx = RootContext::new(r).unwrap();
            assert!(delta(&ctx, 0, 0, 0).unwrap().rel_diff(&LogComplex::ONE) < 1e-15);
        }
        let ctx = RootContext::new(7).unwrap();
        // Radicand [1]!³/[4]! is negative at r = 7 because [4] < 0.
        let radicand = ctx.qint(1).powi(3) / (1..=4).map(|k| ctx.qint(k)).product::<f64>();
        assert!(radicand < 0.0);
        let d = delta(&ctx, 2, 2, 2).unwrap().to_complex();
        assert!(d.re.abs() < 1e-15 && (d.im - (-radicand).sqrt()).abs() < 1e-14);
        let ctx = RootContext::new(11).unwrap();
        // (8, 8, 8) breaks the level bound 24 > 2(r-2); (4, 4, 6) has radicand
        // [1]![3]!²/[8]! < 0 since [6], [7], [8] are negative.
        assert!(delta(&ctx, 8, 8, 8).is_err());
        assert!((delta(&ctx, 4, 4, 6).unwrap().phase - 0.5 * PI).abs() < 1e-15);
        assert!(delta(&ctx, 2, 2, 6).is_err());
    }

    #[test]
    fn admissibility_examples() {
        assert!(triple_admissible(5, 2, 2, 2));
        assert!(!triple_admissible(5, 2, 2, 4));
        assert!(!triple_admissible(5, 1, 1, 0));
        assert!(!is_admissible(7, &[2, 2, 4, 4, 4, 2]));
    }

    #[test]
    fn inadmissible_is_error_or_zero() {
        let ctx = RootContext::new(5).unwrap();
        let m = [2, 2, 4, 0, 0, 0];
        assert!(matches!(sixj(&ctx, m), Err(Error::NotAdmissible(_))));
        assert!(sixj_lenient(&ctx, m).is_zero());
    }

    #[test]
    fn cache_is_transparent() {
        let ctx = RootContext::new(31).unwrap();
        let cached = CachedEvaluator::new(Arc::new(DefinitionalSum::default()), 4);
        let m = [14, 16, 14, 16, 16, 14];
        let a = cached.evaluate(&ctx, m).unwrap();
        let b = cached.evaluate(&ctx, [16, 14, 16, 14, 14, 16]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, sixj(&ctx, m).unwrap());
        assert_eq!(cached.hits(), 1);
    }

    #[test]
    fn registry_lists_both_evaluators() {
        let reg = evaluators(Precision::Double, ContourSpec::default());
        assert_eq!(reg.names(), vec!["dilog", "sum"]);
        assert_eq!(reg.default_entry().unwrap().name(), "sum");
    }
}
