//! Special functions: the dilogarithm, the Lobachevsky function and the
//! quantum dilogarithm φ_r.

mod li2;
mod lobachevsky;
mod qdilog;

pub use li2::{li2, log_one_minus_exp2i, zeta};
pub use lobachevsky::{lobachevsky, v8};
pub use qdilog::{phi_r, ContourSpec, PhiTable};
