//! Small complex linear-algebra helpers shared by the optimizer modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `u vᴴ`.
pub fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

/// `|hᴴ w|²`.
pub fn gain(h: &CVec, w: &CVec) -> f64 {
    h.dotc(w).norm_sqr()
}

/// `Re(hᴴ W h)`, equal to `Tr(h hᴴ W)` for Hermitian `W`.
pub fn quad(h: &CVec, w: &CMat) -> f64 {
    h.dotc(&(w * h)).re
}

/// `Re Tr(C X)`.
pub fn re_trace(c: &CMat, x: &CMat) -> f64 {
    let mut s = 0.0;
    for i in 0..c.nrows() {
        for j in 0..c.ncols() {
            s += (c[(i, j)] * x[(j, i)]).re;
        }
    }
    s
}

pub fn trace_re(x: &CMat) -> f64 {
    x.diagonal().iter().map(|z| z.re).sum()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// `(X + Xᴴ)/2`.
pub fn hermitian_part(x: &CMat) -> CMat {
    (x + x.adjoint()) * c(0.5, 0.0)
}

/// Largest absolute deviation from Hermitian symmetry.
pub fn hermitian_defect(x: &CMat) -> f64 {
    (x - x.adjoint()).iter().fold(0.0, |a, z| a.max(z.norm()))
}

/// Eigenpairs of a Hermitian matrix sorted by decreasing eigenvalue.
pub fn herm_eig_desc(x: &CMat) -> (Vec<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(x));
    let n = x.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, k| eig.eigenvectors[(r, idx[k])]);
    (vals, vecs)
}

pub fn min_eigenvalue(x: &CMat) -> f64 {
    let (v, _) = herm_eig_desc(x);
    *v.last().unwrap_or(&0.0)
}

/// Relative Frobenius distance `‖a − b‖ / max(‖b‖, tiny)`.
pub fn rel_change(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Interleaved `[re0, im0, re1, im1, ...]`.
pub fn interleave(v: &CVec) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn deinterleave(v: &[f64]) -> CVec {
    CVec::from_iterator(v.len() / 2, v.chunks(2).map(|p| c(p[0], p[1])))
}
