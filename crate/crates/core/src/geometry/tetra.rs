//! Combinatorics of a single building block (truncated tetrahedron).
//!
//! Edge slots are numbered 0..6. Slots (0,1,2), (0,4,5), (1,3,5), (2,3,4)
//! bound the four truncation triangles; slots (0,3), (1,4), (2,5) are pairs of
//! opposite edges.

use nalgebra::Matrix4;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Edge slots around each truncation triangle (vertex of the dual tetrahedron).
pub const TRIANGLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 4, 5], [1, 3, 5], [2, 3, 4]];

/// Edge slots in each quadrilateral half-sum (complement of an opposite pair).
pub const QUADS: [[usize; 4]; 3] = [[0, 1, 3, 4], [0, 2, 3, 5], [1, 2, 4, 5]];

/// The pair of triangles meeting along each edge slot.
const EDGE_TRIANGLES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [2, 3], [1, 3], [1, 2]];

/// The 24 permutations of edge slots induced by the tetrahedral group.
///
/// `perm[k]` is the slot whose value lands in slot `k`.
pub fn symmetry_group() -> [[usize; 6]; 24] {
    let mut out = [[0usize; 6]; 24];
    let mut idx = 0;
    let mut perm = [0usize, 1, 2, 3];
    permute(&mut perm, 0, &mut |p| {
        let mut e = [0usize; 6];
        for (slot, tri) in EDGE_TRIANGLES.iter().enumerate() {
            let image = {
                let mut a = [p[tri[0]], p[tri[1]]];
                a.sort_unstable();
                a
            };
            let src = EDGE_TRIANGLES
                .iter()
                .position(|t| {
                    let mut b = *t;
                    b.sort_unstable();
                    b == image
                })
                .expect("edge image");
            e[slot] = src;
        }
        out[idx] = e;
        idx += 1;
    });
    out
}

fn permute(p: &mut [usize; 4], k: usize, f: &mut impl FnMut(&[usize; 4])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Lexicographically smallest tuple in the symmetry orbit of `m`.
pub fn orbit_representative<T: Copy + Ord>(m: [T; 6]) -> [T; 6] {
    use std::sync::OnceLock;
    static GROUP: OnceLock<[[usize; 6]; 24]> = OnceLock::new();
    let g = GROUP.get_or_init(symmetry_group);
    let mut best = m;
    for p in g {
        let cand = [m[p[0]], m[p[1]], m[p[2]], m[p[3]], m[p[4]], m[p[5]]];
        if cand < best {
            best = cand;
        }
    }
    best
}

/// Half-sums τ_i over triangles.
pub fn tau<T>(a: &[T; 6]) -> [T; 4]
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    TRIANGLES.map(|t| (a[t[0]] + a[t[1]] + a[t[2]]) * 0.5)
}

/// Half-sums η_j over quadrilaterals.
pub fn eta<T>(a: &[T; 6]) -> [T; 3]
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    QUADS.map(|q| (a[q[0]] + a[q[1]] + a[q[2]] + a[q[3]]) * 0.5)
}

/// Hyperideal-type test on angles `α_k` (typically `2π m_k / r`).
///
/// Each triangle triple must satisfy `0 <= α_i + α_j - α_k <= 2π` and
/// `2π <= α_i + α_j + α_k <= 4π`, up to `tol`. With `θ_k = |π - α_k|` this
/// says the three dihedral angles at every vertex sum to at most π, i.e. each
/// vertex 3x3 principal minor of the Gram matrix is non-positive.
pub fn is_hyperideal_type(alpha: &[f64; 6], tol: f64) -> bool {
    TRIANGLES.iter().all(|t| {
        let a = [alpha[t[0]], alpha[t[1]], alpha[t[2]]];
        let s: f64 = a.iter().sum();
        let pair_ok = (0..3).all(|i| {
            let d = s - 2.0 * a[i];
            d >= -tol && d <= 2.0 * PI + tol
        });
        pair_ok && s >= 2.0 * PI - tol && s <= 4.0 * PI + tol
    })
}

/// Gram matrix `G(z)` with off-diagonal entries `-cosh z_k`.
pub fn gram_matrix(z: &[Complex64; 6]) -> Matrix4<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let c: Vec<Complex64> = z.iter().map(|x| -x.cosh()).collect();
    Matrix4::new(
        one, c[0], c[1], c[5], //
        c[0], one, c[2], c[4], //
        c[1], c[2], one, c[3], //
        c[5], c[4], c[3], one,
    )
}

pub fn gram_det(z: &[Complex64; 6]) -> Complex64 {
    gram_matrix(z).determinant()
}
