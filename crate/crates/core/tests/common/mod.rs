//! Plain-complex reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use shadowrt::sixj::Colors6;
use std::f64::consts::TAU;

/// Quantum integer from its definition in terms of q.
pub fn naive_qint(n: i64, r: u32) -> Complex64 {
    let q = Complex64::from_polar(1.0, TAU / r as f64);
    (q.powi(n as i32) - q.powi(-(n as i32))) / (q - q.inv())
}

pub fn naive_fact(n: i64, r: u32) -> Complex64 {
    (1..=n).map(|k| naive_qint(k, r)).product()
}

pub fn naive_delta(a: i64, b: i64, c: i64, r: u32) -> Complex64 {
    let x = naive_fact((a + b - c) / 2, r) * naive_fact((b + c - a) / 2, r) * naive_fact((c + a - b) / 2, r)
        / naive_fact((a + b + c) / 2 + 1, r);
    let x = x.re;
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

pub fn naive_sixj(m: &Colors6, r: u32) -> Complex64 {
    let m: Vec<i64> = m.iter().map(|&x| x as i64).collect();
    let t = [
        (m[0] + m[1] + m[2]) / 2,
        (m[0] + m[4] + m[5]) / 2,
        (m[1] + m[3] + m[5]) / 2,
        (m[2] + m[3] + m[4]) / 2,
    ];
    let q =
        [(m[0] + m[1] + m[3] + m[4]) / 2, (m[0] + m[2] + m[3] + m[5]) / 2, (m[1] + m[2] + m[4] + m[5]) / 2];
    let lo = *t.iter().max().unwrap();
    let hi = (*q.iter().min().unwrap()).min(r as i64 - 2);
    let mut s = Complex64::new(0.0, 0.0);
    for k in lo..=hi {
        let mut term = naive_fact(k + 1, r) * if k % 2 == 0 { 1.0 } else { -1.0 };
        for ti in t {
            term /= naive_fact(k - ti, r);
        }
        for qj in q {
            term /= naive_fact(qj - k, r);
        }
        s += term;
    }
    let total: i64 = m.iter().sum();
    let pre = Complex64::i().powi(-(total as i32))
        * naive_delta(m[0], m[1], m[2], r)
        * naive_delta(m[0], m[4], m[5], r)
        * naive_delta(m[1], m[3], m[5], r)
        * naive_delta(m[2], m[3], m[4], r);
    pre * s
}

/// `{n} = q^{n/2} - q^{-n/2}` from the definition.
pub fn naive_brace(n: i64, r: u32) -> Complex64 {
    let h = Complex64::from_polar(1.0, TAU * n as f64 / (2.0 * r as f64));
    h - h.inv()
}

/// `q^{x}` for rational `x = num/den`.
pub fn naive_qpow(num: i64, den: i64, r: u32) -> Complex64 {
    Complex64::from_polar(1.0, TAU * num as f64 / (den as f64 * r as f64))
}
