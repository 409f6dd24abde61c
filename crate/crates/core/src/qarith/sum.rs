use super::logc::LogComplex;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Accumulator precision for log-space sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    /// Compensated double-precision accumulation.
    #[default]
    Double,
    /// Double-double accumulation; recommended for r > 4001.
    Extended,
}

impl std::str::FromStr for Precision {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(crate::Error::InvalidArgument(format!(
                "precision must be double or extended, got {other:?}"
            ))),
        }
    }
}

/// Number of terms summed sequentially at each leaf of the reduction tree.
const LEAF: usize = 256;
/// Below this many terms the reduction tree is walked on one thread.
const PAR_THRESHOLD: usize = 8 * LEAF;

/// Error-free sum: returns (s, e) with s + e == a + b exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// A real double-double value (hi + lo).
#[derive(Debug, Clone, Copy, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    #[inline]
    fn add_f64(self, x: f64) -> Dd {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = two_sum(s, e + self.lo);
        Dd { hi, lo }
    }

    #[inline]
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (hi, lo) = two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Partial sum of one tree node: real and imaginary double-double parts.
#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    re: Dd,
    im: Dd,
}

impl Partial {
    fn combine(self, o: Partial) -> Partial {
        Partial { re: self.re.add(o.re), im: self.im.add(o.im) }
    }
}

fn leaf_sum(terms: &[LogComplex], shift: f64, precision: Precision) -> Partial {
    match precision {
        Precision::Double => {
            // Neumaier compensation, carried in the lo word.
            let (mut sr, mut cr, mut si, mut ci) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for t in terms {
                if t.is_zero() {
                    continue;
                }
                let z = Complex64::from_polar((t.log_mag - shift).exp(), t.phase);
                let (s, e) = two_sum(sr, z.re);
                sr = s;
                cr += e;
                let (s, e) = two_sum(si, z.im);
                si = s;
                ci += e;
            }
            Partial { re: Dd { hi: sr, lo: cr }, im: Dd { hi: si, lo: ci } }
        }
        Precision::Extended => {
            let mut p = Partial::default();
            for t in terms {
                if t.is_zero() {
                    continue;
                }
                let m = (t.log_mag - shift).exp();
                let (s, c) = t.phase.sin_cos();
                p.re = p.re.add_f64(m * c);
                p.im = p.im.add_f64(m * s);
            }
            p
        }
    }
}

fn tree(terms: &[LogComplex], shift: f64, precision: Precision, parallel: bool) -> Partial {
    if terms.len() <= LEAF {
        return leaf_sum(terms, shift, precision);
    }
    // Split on a leaf boundary so the tree shape depends only on the length.
    let leaves = terms.len().div_ceil(LEAF);
    let mid = (leaves / 2) * LEAF;
    let (a, b) = terms.split_at(mid);
    let (pa, pb) = if parallel && terms.len() >= PAR_THRESHOLD {
        rayon::join(|| tree(a, shift, precision, parallel), || tree(b, shift, precision, parallel))
    } else {
        (tree(a, shift, precision, false), tree(b, shift, precision, false))
    };
    pa.combine(pb)
}

fn finish(p: Partial, shift: f64) -> LogComplex {
    let z = Complex64::new(p.re.value(), p.im.value());
    let l = LogComplex::from_complex(z);
    if l.is_zero() {
        return l;
    }
    LogComplex::new(l.log_mag + shift, l.phase)
}

fn max_log_mag(terms: &[LogComplex]) -> Option<f64> {
    terms.iter().filter(|t| !t.is_zero()).map(|t| t.log_mag).fold(None, |m, x| {
        Some(match m {
            None => x,
            Some(y) => y.max(x),
        })
    })
}

/// Sums values stored in log form.
///
/// Terms are rescaled by the largest magnitude, accumulated with compensated
/// (or double-double) arithmetic and reduced over a pairwise tree whose shape
/// depends only on the number of terms. The result is therefore bit-identical
/// to [`par_log_sum`] for the same input.
pub fn log_sum(terms: &[LogComplex], precision: Precision) -> LogComplex {
    match max_log_mag(terms) {
        None => LogComplex::ZERO,
        Some(m) => finish(tree(terms, m, precision, false), m),
    }
}

/// Parallel variant of [`log_sum`] with an identical result.
pub fn par_log_sum(terms: &[LogComplex], precision: Precision) -> LogComplex {
    match max_log_mag(terms) {
        None => LogComplex::ZERO,
        Some(m) => finish(tree(terms, m, precision, true), m),
    }
}
