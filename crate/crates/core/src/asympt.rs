//! Growth-rate fits of invariant sequences, the predicted leading term from
//! the geometric side, and the end-to-end comparison report.

use crate::filling::{rt_filled, SurgeryPresentation};
use crate::fsl::{Finding, FslPresentation};
use crate::geometry::{
    find_critical_point, torsion, ConeData, GeometricSolution, SolverOptions, SystemPotential, TorsionReport,
};
use crate::qarith::{wrap_phase, LogComplex, Precision, RootContext};
use crate::sixj::SixjEvaluator;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Width of the window in which Chern-Simons values are compared.
pub const CS_WINDOW: f64 = PI * PI / 2.0;

/// Least-squares fit of `log RT_r ≈ (Vol + i CS) r/(4π) + power log r + const`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub vol: f64,
    pub cs: f64,
    /// Real exponent of `r` in the prefactor.
    pub power: f64,
    /// Imaginary part of the `log r` coefficient.
    pub power_phase: f64,
    pub constant: Complex64,
    /// Root-mean-square residual of the complex fit.
    pub rms_residual: f64,
}

/// Phases unwrapped along the sequence so consecutive steps lie in `(-π, π]`.
pub fn unwrap_phases(phases: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(phases.len());
    for &p in phases {
        let next = match out.last() {
            Some(&prev) => prev + wrap_phase(p - prev),
            None => p,
        };
        out.push(next);
    }
    out
}

/// Fits the growth model to `(r, RT_r)` points, sorted by `r` before the
/// phases are unwrapped.
pub fn growth_fit(points: &[(u32, LogComplex)]) -> Result<GrowthFit> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "growth fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(_, v)| v.is_zero() || !v.log_mag.is_finite()) {
        return Err(Error::InvalidArgument("growth fit requires nonzero finite values".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by_key(|(r, _)| *r);
    let design = DMatrix::from_fn(pts.len(), 3, |k, col| {
        let r = pts[k].0 as f64;
        match col {
            0 => r / (4.0 * PI),
            1 => r.ln(),
            _ => 1.0,
        }
    });
    let mags = DVector::from_iterator(pts.len(), pts.iter().map(|(_, v)| v.log_mag));
    let phases = unwrap_phases(&pts.iter().map(|(_, v)| v.phase).collect::<Vec<_>>());
    let phases = DVector::from_vec(phases);
    let svd = design.clone().svd(true, true);
    let solve =
        |b: &DVector<f64>| svd.solve(b, 1e-12).map_err(|e| Error::Degenerate(format!("growth fit: {e}")));
    let re = solve(&mags)?;
    let im = solve(&phases)?;
    let res_re = &design * &re - &mags;
    let res_im = &design * &im - &phases;
    let rms = ((res_re.norm_squared() + res_im.norm_squared()) / pts.len() as f64).sqrt();
    Ok(GrowthFit {
        vol: re[0],
        cs: im[0],
        power: re[1],
        power_phase: im[1],
        constant: Complex64::new(re[2], im[2]),
        rms_residual: rms,
    })
}

/// Aitken Δ² extrapolation of three consecutive terms; `None` when the
/// second difference vanishes.
pub fn aitken(x0: f64, x1: f64, x2: f64) -> Option<f64> {
    let d2 = x2 - 2.0 * x1 + x0;
    if d2.abs() < 1e-300 {
        return None;
    }
    Some(x2 - (x2 - x1).powi(2) / d2)
}

/// Distance between two Chern-Simons values modulo `π²/2`.
pub fn cs_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(CS_WINDOW);
    d.min(CS_WINDOW - d)
}

/// Predicted leading term
/// `C e^{½Σμ_k H(γ_k)} / √(±𝕋) · e^{(r/4π)(Vol + i CS)}` of the filled
/// invariant at the level of `ctx`, for a solution at that level's angles.
///
/// The polynomial prefactor and `C` have unit modulus up to the factor
/// `(2cos(π/r))^c`, which the 6j normalization contributes. The phase is
/// defined modulo `π` (sign of the square root) and the signature ambiguity.
pub fn predicted_leading(
    ctx: &RootContext,
    p: &FslPresentation,
    s: &SurgeryPresentation,
    sol: &GeometricSolution,
    tor: &TorsionReport,
) -> LogComplex {
    let r = ctx.r() as f64;
    let c = p.c as f64;
    let zeta = s.total_length() as f64;
    let a_sum: f64 = s.cf.iter().flatten().map(|&a| a as f64).sum();
    let framing: f64 = p.framing.iter().map(|&a| a as f64).sum();
    let iota: f64 = p.iota.iter().map(|&i| i as f64).sum();
    let sigma = p.signature_hint as f64;
    let n_filled = s.filled.len() as f64;
    // Phase of C in units of π.
    let e = (n_filled + c) / 4.0 - r * c / 2.0 - (zeta - c) / 2.0 + a_sum + framing + iota / 2.0
        - sigma * (-3.0 / r - (r + 1.0) / 4.0)
        - r / 4.0 * (2.0 * zeta + a_sum + framing);
    let half_gamma: Complex64 = sol.h_gamma.iter().zip(&sol.mu).map(|(h, &m)| 0.5 * m as f64 * h).sum();
    let log_mag = half_gamma.re - 0.5 * tor.torsion.norm().ln()
        + r * sol.vol / (4.0 * PI)
        + c * (2.0 * (PI / r).cos()).ln();
    let phase = PI * e + half_gamma.im - 0.5 * tor.torsion.arg() + r * sol.cs_raw / (4.0 * PI);
    LogComplex::new(log_mag, phase)
}

/// Target angles per component: `β_i` on filled components, `α_j` on the
/// others, each near `π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSpec {
    pub targets: Vec<f64>,
}

impl AngleSpec {
    /// Even color in `[0, r-3]` with `2πm/r` closest to `angle`; ties go to
    /// the smaller color.
    pub fn color(r: u32, angle: f64) -> u32 {
        let mut best = (f64::INFINITY, 0u32);
        for m in (0..=r - 3).step_by(2) {
            let d = (TAU * m as f64 / r as f64 - angle).abs();
            if d < best.0 - 1e-15 {
                best = (d, m);
            }
        }
        best.1
    }

    /// Realized colors at level `r`, split into filled and unfilled lists.
    pub fn colors(&self, r: u32, s: &SurgeryPresentation) -> (Vec<u32>, Vec<u32>) {
        let n_i = s.filled.iter().map(|&i| Self::color(r, self.targets[i])).collect();
        let n = self.targets.len();
        let m_j = s.unfilled(n).iter().map(|&j| Self::color(r, self.targets[j])).collect();
        (n_i, m_j)
    }

    /// Cone data at the limit angles.
    pub fn cone(&self, s: &SurgeryPresentation) -> ConeData {
        ConeData {
            beta: s.filled.iter().map(|&i| self.targets[i]).collect(),
            alpha_j: s.unfilled(self.targets.len()).iter().map(|&j| self.targets[j]).collect(),
        }
    }
}

/// Settings for [`verify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub solver: SolverOptions,
    pub precision: Precision,
    /// Relative window at the top of the range over which the prefactor drift
    /// is measured: levels `r ≥ r_max / drift_span`.
    pub drift_span: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { solver: SolverOptions::default(), precision: Precision::Double, drift_span: 10.0 }
    }
}

/// A level that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelFailure {
    pub r: u32,
    pub code: String,
    pub message: String,
}

/// Comparison of a computed invariant sequence with the geometric prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub schema: String,
    pub r_values: Vec<u32>,
    pub rt_values: Vec<LogComplex>,
    /// Predicted leading term at each level, at that level's realized angles.
    pub predicted_values: Vec<LogComplex>,
    /// Volume and raw Chern-Simons value at each level's realized angles.
    pub level_vols: Vec<f64>,
    pub level_cs: Vec<f64>,
    /// Volume fitted from the levels up to and including each one.
    pub running_vol: Vec<Option<f64>>,
    /// Measured over predicted, per level.
    pub prefactor_ratio: Vec<LogComplex>,
    /// Fit of the raw sequence.
    pub raw_fit: GrowthFit,
    /// Fit after removing the drift `(r/4π)((Vol_r + i CS_r) - (Vol + i CS))`
    /// caused by color rounding.
    pub fit: GrowthFit,
    pub fitted_vol: f64,
    pub fitted_cs: f64,
    pub fitted_power: f64,
    /// Aitken extrapolation of `(4π/r) log|RT_r|` (drift-corrected) at
    /// levels near `r_max/4`, `r_max/2`, `r_max`.
    pub aitken_vol: Option<f64>,
    pub predicted_vol: f64,
    pub predicted_cs: f64,
    pub predicted_torsion: Complex64,
    /// `|fitted_cs - predicted_cs|` modulo `π²/2`.
    pub cs_distance: f64,
    /// Relative change of the least-squares trend of `|ratio|` across the
    /// top window of levels.
    pub ratio_drift: Option<f64>,
    /// Max over min of `|ratio|` across the same window, minus one.
    pub ratio_spread: Option<f64>,
    pub warnings: Vec<Finding>,
    pub failures: Vec<LevelFailure>,
}

/// One CSV row of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub r: u32,
    pub log_mag: f64,
    pub phase: f64,
    pub fitted_running_vol: Option<f64>,
    pub predicted_vol: f64,
    pub ratio_mag: f64,
    pub ratio_phase: f64,
}

impl AsymptoticReport {
    pub fn rows(&self) -> Vec<ReportRow> {
        (0..self.r_values.len())
            .map(|k| ReportRow {
                r: self.r_values[k],
                log_mag: self.rt_values[k].log_mag,
                phase: self.rt_values[k].phase,
                fitted_running_vol: self.running_vol[k],
                predicted_vol: self.level_vols[k],
                ratio_mag: self.prefactor_ratio[k].abs(),
                ratio_phase: self.prefactor_ratio[k].phase,
            })
            .collect()
    }
}

struct Level {
    r: u32,
    rt: LogComplex,
    predicted: LogComplex,
    sol: GeometricSolution,
}

fn solve_level(g: &SystemPotential, opts: &SolverOptions) -> Result<(GeometricSolution, TorsionReport)> {
    let sol = find_critical_point(g, opts)?;
    let tor = torsion(g, &sol)?;
    Ok((sol, tor))
}

fn evaluate_level(
    r: u32,
    p: &FslPresentation,
    s: &SurgeryPresentation,
    e: &[i8],
    angles: &AngleSpec,
    eval: &dyn SixjEvaluator,
    opts: &VerifyOptions,
) -> Result<Level> {
    let ctx = RootContext::new(r as i64)?;
    let (n_i, m_j) = angles.colors(r, s);
    let rt = rt_filled(&ctx, p, s, &n_i, &m_j, eval, opts.precision)?.value;
    if rt.is_zero() {
        return Err(Error::Degenerate(format!("invariant vanishes at r = {r}")));
    }
    let g = SystemPotential::new(p, s, e.to_vec(), ConeData::from_colors(r, &n_i, &m_j))?;
    let (sol, tor) = solve_level(&g, &opts.solver)?;
    let predicted = predicted_leading(&ctx, p, s, &sol, &tor);
    Ok(Level { r, rt, predicted, sol })
}

/// Slope of the least-squares line through `(x, y)`.
fn trend_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn nearest_index(rs: &[u32], target: f64) -> usize {
    let mut best = 0;
    for (k, &r) in rs.iter().enumerate() {
        if (r as f64 - target).abs() < (rs[best] as f64 - target).abs() {
            best = k;
        }
    }
    best
}

/// Computes the filled invariant over `r_values`, solves the geometry at each
/// level's realized angles and at the limit angles, fits the growth and
/// compares with the prediction.
///
/// Levels that fail are listed in `failures`; the report needs at least three
/// successful levels.
pub fn verify(
    p: &FslPresentation,
    s: &SurgeryPresentation,
    e: &[i8],
    angles: &AngleSpec,
    r_values: &[u32],
    eval: &dyn SixjEvaluator,
    opts: &VerifyOptions,
) -> Result<AsymptoticReport> {
    if angles.targets.len() != p.n {
        return Err(Error::InvalidArgument(format!(
            "expected {} target angles, got {}",
            p.n,
            angles.targets.len()
        )));
    }
    let mut rs = r_values.to_vec();
    rs.sort_unstable();
    rs.dedup();
    if let Some(&r) = rs.iter().find(|&&r| r % 2 == 0 || r < 5) {
        return Err(Error::InvalidRoot(r as i64));
    }
    let g_ref = SystemPotential::new(p, s, e.to_vec(), angles.cone(s))?;
    let (ref_sol, ref_tor) = solve_level(&g_ref, &opts.solver)?;

    let results: Vec<Result<Level>> =
        rs.par_iter().map(|&r| evaluate_level(r, p, s, e, angles, eval, opts)).collect();
    let mut levels = Vec::new();
    let mut failures = Vec::new();
    for (r, res) in rs.iter().zip(results) {
        match res {
            Ok(l) => levels.push(l),
            Err(err) => {
                failures.push(LevelFailure { r: *r, code: err.code().into(), message: err.to_string() })
            }
        }
    }
    if levels.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "only {} levels evaluated; at least 3 are needed",
            levels.len()
        )));
    }

    let ref_value = Complex64::new(ref_sol.vol, ref_sol.cs_raw);
    let raw: Vec<(u32, LogComplex)> = levels.iter().map(|l| (l.r, l.rt)).collect();
    let corrected: Vec<(u32, LogComplex)> = levels
        .iter()
        .map(|l| {
            let shift = l.r as f64 / (4.0 * PI) * (Complex64::new(l.sol.vol, l.sol.cs_raw) - ref_value);
            (l.r, LogComplex::new(l.rt.log_mag - shift.re, l.rt.phase - shift.im))
        })
        .collect();
    let raw_fit = growth_fit(&raw)?;
    let fit = growth_fit(&corrected)?;
    let running_vol = (0..levels.len()).map(|k| growth_fit(&corrected[..=k]).ok().map(|f| f.vol)).collect();

    let r_list: Vec<u32> = levels.iter().map(|l| l.r).collect();
    let r_max = *r_list.last().expect("nonempty") as f64;
    let idx = [nearest_index(&r_list, r_max / 4.0), nearest_index(&r_list, r_max / 2.0), levels.len() - 1];
    let aitken_vol = if idx[0] < idx[1] && idx[1] < idx[2] {
        let x = idx.map(|k| 4.0 * PI / corrected[k].0 as f64 * corrected[k].1.log_mag);
        aitken(x[0], x[1], x[2])
    } else {
        None
    };

    let ratio: Vec<LogComplex> = levels.iter().map(|l| l.rt * l.predicted.inv()).collect();
    let window: Vec<usize> =
        (0..levels.len()).filter(|&k| levels[k].r as f64 >= r_max / opts.drift_span).collect();
    let (ratio_drift, ratio_spread) = if window.len() >= 2 {
        let x: Vec<f64> = window.iter().map(|&k| levels[k].r as f64).collect();
        let y: Vec<f64> = window.iter().map(|&k| ratio[k].log_mag).collect();
        let span = x[x.len() - 1] - x[0];
        let drift = (trend_slope(&x, &y) * span).exp() - 1.0;
        let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
        (Some(drift.abs()), Some((hi - lo).exp() - 1.0))
    } else {
        (None, None)
    };

    Ok(AsymptoticReport {
        schema: "1".into(),
        r_values: r_list,
        rt_values: levels.iter().map(|l| l.rt).collect(),
        predicted_values: levels.iter().map(|l| l.predicted).collect(),
        level_vols: levels.iter().map(|l| l.sol.vol).collect(),
        level_cs: levels.iter().map(|l| l.sol.cs_raw).collect(),
        running_vol,
        prefactor_ratio: ratio,
        raw_fit,
        fit,
        fitted_vol: fit.vol,
        fitted_cs: fit.cs,
        fitted_power: fit.power,
        aitken_vol,
        predicted_vol: ref_sol.vol,
        predicted_cs: ref_sol.cs,
        predicted_torsion: ref_tor.torsion,
        cs_distance: cs_distance(fit.cs, ref_sol.cs),
        ratio_drift,
        ratio_spread,
        warnings: s.warnings.clone(),
        failures,
    })
}
