use super::{is_admissible, Colors6, SixjEvaluator};
use crate::geometry::tetra::is_hyperideal_type;
use crate::qarith::RootContext;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// One point of a 6j growth sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub r: u32,
    pub colors: Colors6,
    /// `(2π/r) log |6j|`.
    pub growth: f64,
    pub hyperideal: bool,
}

/// A growth sequence together with the levels that had no admissible coloring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSequence {
    pub points: Vec<GrowthPoint>,
    /// Levels skipped because the nearest coloring is not r-admissible.
    pub skipped: Vec<u32>,
}

/// Even colors in `[0, r-3]` whose angles `2πm/r` are closest to `π ± θ_i`.
///
/// Ties are broken toward the smaller color.
pub fn growth_colors(r: u32, theta: &[f64; 6]) -> Colors6 {
    theta.map(|th| {
        let mut best = (f64::INFINITY, 0u32);
        for m in (0..=r - 3).step_by(2) {
            let a = PI - TAU * m as f64 / r as f64;
            let d = (a - th).abs().min((a + th).abs());
            if d < best.0 - 1e-15 {
                best = (d, m);
            }
        }
        best.1
    })
}

/// `(2π/r) log |6j|` along a sequence of odd `r`, with colors tracking the
/// dihedral-angle targets `θ_i = |π - lim 2πm_i/r|`.
///
/// Points are evaluated in parallel and returned in input order. Levels whose
/// nearest coloring is not admissible are skipped and listed in `skipped`.
pub fn sixj_growth(
    r_values: &[u32],
    theta: &[f64; 6],
    evaluator: &dyn SixjEvaluator,
) -> Result<GrowthSequence> {
    if theta.iter().any(|t| !(0.0..=PI).contains(t)) {
        return Err(Error::InvalidArgument("angle targets must lie in [0, π]".into()));
    }
    let results: Vec<Option<GrowthPoint>> = r_values
        .par_iter()
        .map(|&r| {
            let ctx = RootContext::new(r as i64)?;
            let colors = growth_colors(r, theta);
            if !is_admissible(r, &colors) {
                return Ok(None);
            }
            let v = evaluator.evaluate(&ctx, colors)?;
            let alpha = colors.map(|m| TAU * m as f64 / r as f64);
            Ok(Some(GrowthPoint {
                r,
                colors,
                growth: TAU / r as f64 * v.log_mag,
                hyperideal: is_hyperideal_type(&alpha, 1e-9),
            }))
        })
        .collect::<Result<_>>()?;
    let mut seq = GrowthSequence { points: Vec::new(), skipped: Vec::new() };
    for (&r, res) in r_values.iter().zip(results) {
        match res {
            Some(p) => seq.points.push(p),
            None => seq.skipped.push(r),
        }
    }
    Ok(seq)
}
