//! Real parametrization and real symmetric embedding of complex Hermitian matrices.
//!
//! A Hermitian `d×d` matrix `X` is stored as `d²` reals: slot `i*d + j` holds
//! `X_ii` when `i == j`, `Re X_ij` when `i > j` and `Im X_ji` when `i < j`.
//! The embedding `X = A + iB ↦ [[A, −B], [B, A]]` is PSD iff `X` is.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cone::svec_index;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Hermitian matrix to its `d²` real parameters.
pub fn herm_to_params(x: &DMatrix<Complex64>) -> Vec<f64> {
    let d = x.nrows();
    let mut p = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            p[i * d + j] = match i.cmp(&j) {
                std::cmp::Ordering::Equal => x[(i, i)].re,
                std::cmp::Ordering::Greater => x[(i, j)].re,
                std::cmp::Ordering::Less => x[(j, i)].im,
            };
        }
    }
    p
}

/// Real parameters back to the Hermitian matrix.
pub fn params_to_herm(p: &[f64], d: usize) -> DMatrix<Complex64> {
    let mut x = DMatrix::zeros(d, d);
    for i in 0..d {
        x[(i, i)] = Complex64::new(p[i * d + i], 0.0);
        for j in 0..i {
            let v = Complex64::new(p[i * d + j], p[j * d + i]);
            x[(i, j)] = v;
            x[(j, i)] = v.conj();
        }
    }
    x
}

/// `[[Re X, −Im X], [Im X, Re X]]`.
pub fn embed(x: &DMatrix<Complex64>) -> DMatrix<f64> {
    let d = x.nrows();
    let mut y = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let v = x[(i, j)];
            y[(i, j)] = v.re;
            y[(i + d, j + d)] = v.re;
            y[(i + d, j)] = v.im;
            y[(i, j + d)] = -v.im;
        }
    }
    y
}

/// Inverse of [`embed`], reading the left block column.
pub fn unembed(y: &DMatrix<f64>) -> DMatrix<Complex64> {
    let d = y.nrows() / 2;
    DMatrix::from_fn(d, d, |i, j| Complex64::new(y[(i, j)], y[(i + d, j)]))
}

/// Sparse map from Hermitian parameters to svec entries of the order-`2d`
/// embedding: `(param index, svec index, coefficient)`.
pub fn embedding_entries(d: usize) -> Vec<(usize, usize, f64)> {
    let k = 2 * d;
    let mut out = Vec::with_capacity(2 * d * d);
    for i in 0..d {
        let p = i * d + i;
        out.push((p, svec_index(k, i, i), 1.0));
        out.push((p, svec_index(k, i + d, i + d), 1.0));
        for j in 0..i {
            let re = i * d + j;
            out.push((re, svec_index(k, i, j), SQRT2));
            out.push((re, svec_index(k, i + d, j + d), SQRT2));
            let im = j * d + i;
            out.push((im, svec_index(k, d + i, j), SQRT2));
            out.push((im, svec_index(k, d + j, i), -SQRT2));
        }
    }
    out
}

/// Coefficients `f` with `fᵀp = Re Tr(C X)` for the parameters `p` of `X`.
pub fn trace_coefficients(c: &DMatrix<Complex64>) -> Vec<f64> {
    let d = c.nrows();
    let mut f = vec![0.0; d * d];
    for i in 0..d {
        f[i * d + i] = c[(i, i)].re;
        for j in 0..i {
            f[i * d + j] = c[(i, j)].re + c[(j, i)].re;
            f[j * d + i] = c[(i, j)].im - c[(j, i)].im;
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{smat, svec};

    fn sample(d: usize) -> DMatrix<Complex64> {
        let m = DMatrix::from_fn(d, d, |i, j| Complex64::new((i * 3 + j) as f64 * 0.37 - 1.0, (i as f64 - 2.0 * j as f64) * 0.21));
        (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
    }

    #[test]
    fn params_round_trip() {
        let x = sample(4);
        assert_eq!(params_to_herm(&herm_to_params(&x), 4), x);
    }

    #[test]
    fn embedding_entries_match_dense_embedding() {
        let x = sample(3);
        let p = herm_to_params(&x);
        let mut v = vec![0.0; 21];
        for (pi, si, c) in embedding_entries(3) {
            v[si] += c * p[pi];
        }
        let want = svec(&embed(&x));
        for (a, b) in v.iter().zip(&want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(unembed(&smat(&want, 6)).map(|c| (c.re * 1e12).round()), x.map(|c| (c.re * 1e12).round()));
    }

    #[test]
    fn trace_coefficients_reproduce_trace() {
        let x = sample(3);
        let c = DMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 + 0.5 * j as f64, 0.3 * i as f64 - j as f64));
        let f = trace_coefficients(&c);
        let p = herm_to_params(&x);
        let lin: f64 = f.iter().zip(&p).map(|(a, b)| a * b).sum();
        assert!((lin - (c * x).trace().re).abs() < 1e-12);
    }
}
