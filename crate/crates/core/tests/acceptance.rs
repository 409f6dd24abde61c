//! Acceptance criteria A1 to A10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use common::naive_sixj;
use num_complex::Complex64;
use num_rational::Ratio;
use shadowrt::asympt::{aitken, verify, AngleSpec, AsymptoticReport, VerifyOptions};
use shadowrt::filling::{dual_slope, neg_cf, reciprocal_product_sum, SurgeryPresentation};
use shadowrt::fsl::{FslPresentation, SurgerySpec};
use shadowrt::geometry::tetra::TRIANGLES;
use shadowrt::geometry::{
    find_critical_point, potential_u, potential_v, torsion, truncated_tet_volume, xi_of_alpha, ConeData,
    SolverOptions, SystemPotential,
};
use shadowrt::qarith::RootContext;
use shadowrt::sixj::{
    growth_colors, is_admissible, is_hyperideal_colors, sixj, sixj_growth, sixj_via_ur, Colors6,
    DefinitionalSum, GrowthSequence,
};
use shadowrt::specfun::{lobachevsky, phi_r, v8, ContourSpec, PhiTable};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type C = Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

// A1 ------------------------------------------------------------------------

const A1_TOL: f64 = 1e-10;

fn a1() -> Outcome {
    let xi = xi_of_alpha(&[C::new(PI, 0.0); 6]).expect("ξ solve");
    let err = (xi - 1.75 * PI).norm();
    outcome(err < A1_TOL, format!("|ξ(π,…,π) − 7π/4| = {err:.2e} (tol {A1_TOL:.0e})"))
}

// A2 ------------------------------------------------------------------------

const A2_TOL: f64 = 1e-6;
const A2_STEP: f64 = 1e-4;

fn a2() -> Outcome {
    let x0 = [PI, PI, PI, PI, PI, PI, 1.75 * PI];
    let f = |x: &[f64; 7]| potential_v(&[x[0], x[1], x[2], x[3], x[4], x[5]], x[6]);
    let d2 = |i: usize, j: usize| {
        let mut s = 0.0;
        for (si, sj, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
            let mut x = x0;
            x[i] += si * A2_STEP;
            x[j] += sj * A2_STEP;
            s += w * f(&x);
        }
        s / (4.0 * A2_STEP * A2_STEP)
    };
    // Pairs of distinct edges that share a face triangle.
    let adjacent: Vec<(usize, usize)> =
        TRIANGLES.iter().flat_map(|t| [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]).collect();
    let diag: Vec<f64> = (0..6).map(|i| d2(i, i)).collect();
    let off: Vec<f64> = adjacent.iter().map(|&(i, j)| d2(i, j)).collect();
    let mixed: Vec<f64> = (0..6).map(|i| d2(i, 6)).collect();
    let xx = d2(6, 6);
    let worst = |v: &[f64], target: f64| v.iter().map(|x| (x - target).abs()).fold(0.0, f64::max);
    let errs = [worst(&diag, -2.0), worst(&off, -1.0), worst(&mixed, 2.0), (xx + 8.0).abs()];
    outcome(
        errs.iter().all(|&e| e < A2_TOL),
        format!(
            "entries (αα, αα', αξ, ξξ) = ({:.6}, {:.6}, {:.6}, {:.6}) vs (−2, −1, 2, −8); errors {:.1e} {:.1e} {:.1e} {:.1e} (tol {A2_TOL:.0e})",
            diag[0], off[0], mixed[0], xx, errs[0], errs[1], errs[2], errs[3]
        ),
    )
}

// A3 ------------------------------------------------------------------------

const A3_TOL: f64 = 1e-10;

fn a3() -> Outcome {
    let vol = truncated_tet_volume(&[0.0; 6]).expect("volume");
    let e1 = (vol - 8.0 * lobachevsky(PI / 4.0)).abs();
    let u = potential_u(&[C::new(PI, 0.0); 6], C::new(1.75 * PI, 0.0)).expect("U");
    let e2 = (u.im - 2.0 * v8()).abs();
    outcome(
        e1 < A3_TOL && e2 < A3_TOL,
        format!("|Vol(0) − 8Λ(π/4)| = {e1:.1e}, |Im U − 2v₈| = {e2:.1e} (tol {A3_TOL:.0e})"),
    )
}

// A4 ------------------------------------------------------------------------

const A4_TOL: f64 = 1e-8;
const A4_CONVERGE: f64 = 50.0;

fn a4() -> Outcome {
    let spec = ContourSpec::default();
    let phi = |z: C, r: u32| phi_r(z, r, &spec).expect("φ_r");
    let e_r = |r: u32, w: C| (w * r as f64 / C::new(0.0, 4.0 * PI)).exp();
    let rel = |a: C, b: C| (a - b).norm() / b.norm();
    let grid: Vec<C> = (0..10)
        .flat_map(|k| {
            let x = PI * (k as f64 + 0.5) / 10.0;
            [C::new(x, 0.15), C::new(x, -0.1)]
        })
        .collect();
    let mut worst = [0.0f64; 5];
    let mut converge = 0.0f64;
    for r in [5u32, 31, 101] {
        let rf = r as f64;
        let ctx = RootContext::new(r as i64).unwrap();
        for &z in &grid {
            let fund = e_r(r, phi(z - PI / rf, r) - phi(z + PI / rf, r));
            worst[0] = worst[0].max(rel(fund, 1.0 - (C::new(0.0, 2.0) * z).exp()));
            let f2 = e_r(r, phi(z, r) - phi(z + PI, r));
            worst[1] = worst[1].max(rel(f2, 1.0 + (C::new(0.0, rf) * z).exp()));
        }
        let base = phi(C::new(PI / rf, 0.0), r);
        let mut poch = C::new(1.0, 0.0);
        let mut full = C::new(1.0, 0.0);
        for n in 0..=r - 2 {
            if n > 0 {
                poch *= 1.0 - ctx.q().powu(2 * n);
                full *= ctx.q().powu(n) - ctx.q().powu(n).inv();
            }
            let z = (2 * n + 1) as f64 * PI / rf;
            let tail = base - phi(C::new(z, 0.0), r);
            worst[2] = worst[2].max(rel(e_r(r, tail), poch));
            let x = 2.0 * PI * n as f64 / rf;
            let shift = C::new(-2.0 * PI * x + (2.0 * PI / rf).powi(2) * (n * n + n) as f64, 0.0);
            worst[3] = worst[3].max(rel(e_r(r, shift + tail), full));
            if n >= (r - 1) / 2 {
                let moved = base - phi(C::new(z - PI, 0.0), r);
                worst[4] = worst[4].max(rel(2.0 * e_r(r, shift + moved), full));
            }
        }
        let approx = C::new(PI * PI / 6.0 - PI * PI / rf, 2.0 * PI / rf * (rf / 2.0).ln());
        converge = converge.max((base - approx).norm() * rf * rf);
    }
    outcome(
        worst.iter().all(|&w| w < A4_TOL) && converge < A4_CONVERGE,
        format!(
            "max residuals fund {:.1e}, f2 {:.1e}, (q)_n {:.1e}, factorial(1) {:.1e}, factorial(2) {:.1e} (tol {A4_TOL:.0e}); r²·|φ_r(π/r) − approx| ≤ {converge:.2} (bound {A4_CONVERGE})",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

// A5 ------------------------------------------------------------------------

const A5_NAIVE_TOL: f64 = 1e-10;
const A5_DILOG_TOL: f64 = 1e-7;

fn all_tuples(r: u32) -> impl Iterator<Item = Colors6> {
    let colors: Vec<u32> = (0..=r - 3).step_by(2).collect();
    let n = colors.len();
    (0..n.pow(6)).map(move |mut idx| {
        let mut m = [0u32; 6];
        for slot in m.iter_mut() {
            *slot = colors[idx % n];
            idx /= n;
        }
        m
    })
}

fn a5() -> Outcome {
    let ctx = RootContext::new(5).unwrap();
    let mut naive_err = 0.0f64;
    let mut naive_count = 0;
    for m in all_tuples(5).filter(|m| is_admissible(5, m)) {
        let a = sixj(&ctx, m).unwrap().to_complex();
        let b = naive_sixj(&m, 5);
        naive_err = naive_err.max((a - b).norm() / b.norm().max(1.0));
        naive_count += 1;
    }
    let mut dilog_err = 0.0f64;
    let mut dilog_count = 0;
    for r in [7u32, 9, 11] {
        let ctx = RootContext::new(r as i64).unwrap();
        let table = PhiTable::new(r, ContourSpec::default()).unwrap();
        for m in all_tuples(r).filter(|m| is_admissible(r, m) && is_hyperideal_colors(r, m)) {
            let b = sixj_via_ur(&ctx, &table, m).unwrap();
            dilog_err = dilog_err.max(sixj(&ctx, m).unwrap().rel_diff(&b.value));
            dilog_count += 1;
        }
    }
    outcome(
        naive_err < A5_NAIVE_TOL && dilog_err < A5_DILOG_TOL && dilog_count > 0,
        format!(
            "r=5: {naive_count} tuples, max rel err {naive_err:.1e} (tol {A5_NAIVE_TOL:.0e}); r∈{{7,9,11}}: {dilog_count} hyperideal tuples, max rel err {dilog_err:.1e} (tol {A5_DILOG_TOL:.0e})"
        ),
    )
}

// A6 ------------------------------------------------------------------------

const A6_LEVELS: [u32; 3] = [501, 1001, 2001];
const A6_REL_TOL: f64 = 0.01;

fn a6_sequence() -> GrowthSequence {
    sixj_growth(&A6_LEVELS, &[0.0; 6], &DefinitionalSum::default()).expect("growth sequence")
}

fn a6(seq: &GrowthSequence) -> Outcome {
    if seq.points.len() != 3 {
        return outcome(false, format!("levels skipped: {:?}", seq.skipped));
    }
    let g: Vec<f64> = seq.points.iter().map(|p| p.growth).collect();
    let acc = aitken(g[0], g[1], g[2]).unwrap_or(f64::NAN);
    let rel = (acc - v8()).abs() / v8();
    outcome(
        rel < A6_REL_TOL,
        format!(
            "colors {:?}; raw (2π/r)log|6j| = {:.6}, {:.6}, {:.6}; Aitken {acc:.6} vs v₈ {:.6}, rel err {:.2e} (tol {A6_REL_TOL})",
            growth_colors(A6_LEVELS[0], &[0.0; 6]),
            g[0],
            g[1],
            g[2],
            v8(),
            rel
        ),
    )
}

// A7 ------------------------------------------------------------------------

fn a7() -> Outcome {
    let mut count = 0;
    let mut bad = Vec::new();
    for p in -50i64..=50 {
        for q in 1..p.abs() {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            count += 1;
            let d = dual_slope(p, q).unwrap();
            let a = neg_cf(p, q).unwrap();
            let ok = p * d.p_prime + q * d.q_prime == 1
                && reciprocal_product_sum(&a) == Ratio::new(-d.p_prime as i128, q as i128);
            if !ok {
                bad.push((p, q));
            }
        }
    }
    outcome(bad.is_empty(), format!("{count} coprime slopes, {} failures {:?}", bad.len(), bad))
}

// A8, A9 presentation ---------------------------------------------------------

fn presentation(surgery: Option<SurgerySpec>) -> FslPresentation {
    FslPresentation {
        schema: "1".into(),
        c: 1,
        n: 3,
        incidence: vec![[1, 2, 3, 1, 2, 3]],
        iota: vec![0, 0, 0],
        framing: vec![0, 1, -1],
        surgery,
        signature_hint: 0,
    }
}

fn filled() -> FslPresentation {
    presentation(Some(SurgerySpec { filled: vec![1], slopes: vec![[5, 3]] }))
}

/// Half cone angle: cone angles are 2|β − π| and 2|α − π|.
const HALF_CONE: f64 = 0.05;

fn targets() -> AngleSpec {
    AngleSpec { targets: vec![PI + HALF_CONE, PI - HALF_CONE, PI + HALF_CONE] }
}

// A8 ------------------------------------------------------------------------

const A8_FILLING_TOL: f64 = 1e-10;
const A8_IDENTITY_TOL: f64 = 1e-6;
const A8_TORSION_TOL: f64 = 1e-8;

fn a8() -> Outcome {
    let p = filled();
    let s = SurgeryPresentation::from_presentation(&p).unwrap();
    let g = SystemPotential::new(&p, &s, vec![1], targets().cone(&s)).unwrap();
    let sol = find_critical_point(&g, &SolverOptions::default()).expect("filled solve");
    let t = torsion(&g, &sol).expect("torsion");
    let l35 = t.gram_identities.iter().map(|c| c.rel_err).fold(0.0, f64::max);

    let q = presentation(None);
    let s0 = SurgeryPresentation::from_presentation(&q).unwrap();
    let g0 = SystemPotential::new(&q, &s0, vec![], ConeData { beta: vec![], alpha_j: vec![PI; 3] }).unwrap();
    let sol0 = find_critical_point(&g0, &SolverOptions::default()).expect("complete solve");
    let t0 = torsion(&g0, &sol0).expect("complete torsion");
    let expected = 2f64.powi(5 * q.c as i32);
    let e4 = (t0.torsion.norm() - expected).abs() / expected;

    let checks = [
        sol.filling_residual < A8_FILLING_TOL,
        t.hessian_identity.rel_err < A8_IDENTITY_TOL,
        l35 < A8_IDENTITY_TOL,
        e4 < A8_TORSION_TOL,
    ];
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "(i) filling residual {:.1e} (tol {A8_FILLING_TOL:.0e}); (ii) Hessian-determinant identity rel {:.1e}; (iii) Gram-determinant identity rel {:.1e} (tol {A8_IDENTITY_TOL:.0e}); (iv) |𝕋| = {:.10} vs {expected}, rel {:.1e} (tol {A8_TORSION_TOL:.0e}); Vol = {:.6}",
            sol.filling_residual, t.hessian_identity.rel_err, l35, t0.torsion.norm(), e4, sol.vol
        ),
    )
}

// A9 ------------------------------------------------------------------------

const A9_R_MIN: u32 = 51;
const A9_R_MAX: u32 = 301;
const A9_VOL_TOL: f64 = 0.2;
const A9_DRIFT_TOL: f64 = 0.10;
const A9_CS_TOL: f64 = 0.2;

fn a9_report() -> AsymptoticReport {
    let p = filled();
    let s = SurgeryPresentation::from_presentation(&p).unwrap();
    let rs: Vec<u32> = (A9_R_MIN..=A9_R_MAX).step_by(2).collect();
    verify(&p, &s, &[1], &targets(), &rs, &DefinitionalSum::default(), &VerifyOptions::default())
        .expect("verify run")
}

fn a9(rep: &AsymptoticReport) -> Outcome {
    let dv = (rep.fitted_vol - rep.predicted_vol).abs();
    let drift = rep.ratio_drift.unwrap_or(f64::INFINITY);
    let vol_ok = dv < A9_VOL_TOL;
    let drift_ok = drift < A9_DRIFT_TOL;
    let cs_ok = rep.cs_distance < A9_CS_TOL;
    outcome(
        vol_ok && drift_ok && rep.failures.is_empty(),
        format!(
            "r∈[{A9_R_MIN},{A9_R_MAX}] odd, {} levels; fitted vol {:.4} vs predicted {:.4}, |Δ| = {dv:.3} (tol {A9_VOL_TOL}) {}; prefactor drift {:.1}% (tol {:.0}%) {}; CS distance mod π²/2 {:.3} (tol {A9_CS_TOL}, non-fatal) {}; Aitken vol {:?}; spread {:.2}",
            rep.r_values.len(),
            rep.fitted_vol,
            rep.predicted_vol,
            if vol_ok { "ok" } else { "FAIL" },
            100.0 * drift,
            100.0 * A9_DRIFT_TOL,
            if drift_ok { "ok" } else { "FAIL" },
            rep.cs_distance,
            if cs_ok { "ok" } else { "FAIL" },
            rep.aitken_vol,
            rep.ratio_spread.unwrap_or(f64::NAN),
        ),
    )
}

// A10 -----------------------------------------------------------------------

fn a10() -> Outcome {
    let mut outputs = Vec::new();
    for threads in [1usize, 4, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let (a, b) = pool.install(|| (a6_sequence(), a9_report()));
        outputs.push((threads, serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap()));
    }
    let (_, a0, b0) = &outputs[0];
    let same = outputs.iter().all(|(_, a, b)| a == a0 && b == b0);
    outcome(
        same,
        format!(
            "A6 and A9 JSON outputs at 1, 4, 8 threads {} ({} + {} bytes)",
            if same { "byte-identical" } else { "DIFFER" },
            a0.len(),
            b0.len()
        ),
    )
}

fn run(id: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = o.pass && in_time;
    println!(
        "{id} {} {} [{:.2} s, limit {} s{}]",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", exceeded" }
    );
    pass
}

fn main() {
    let secs = Duration::from_secs;
    let mut results = vec![
        run("A1", secs(1), a1),
        run("A2", secs(1), a2),
        run("A3", secs(1), a3),
        run("A4", secs(30), a4),
        run("A5", secs(120), a5),
    ];
    results.push(run("A6", secs(600), || a6(&a6_sequence())));
    results.push(run("A7", secs(5), a7));
    results.push(run("A8", secs(60), a8));
    results.push(run("A9", secs(1800), || a9(&a9_report())));
    results.push(run("A10", secs(1800), a10));
    let failed = results.iter().filter(|&&p| !p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
