//! Echo receive filter: the dominant eigenvector of the sensing matrix
//! `S = (κ²/2σ²)·h_ta h_taᴴ (W_bo + W_ta) h_ta h_taᴴ`, which maximizes the
//! Rayleigh quotient `aᴴSa / aᴴa`, that is, the echo SCNR.

use crate::linalg::{c, hermitian_defect, hermitian_part, outer, quad, CMat, CVec};

#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    pub s: CMat,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EchoError {
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("sigma2 must be positive")]
    NonPositiveNoise,
}

pub fn build_sensing_matrix(h_ta: &CVec, w_bo: &CVec, w_ta: &CVec, kappa2: f64, sigma2: f64) -> Result<SensingMatrix, EchoError> {
    build_sensing_matrix_lifted(h_ta, &(outer(w_bo, w_bo) + outer(w_ta, w_ta)), kappa2, sigma2)
}

/// Same as [`build_sensing_matrix`] with the transmit covariance sum given.
pub fn build_sensing_matrix_lifted(h_ta: &CVec, w_sum: &CMat, kappa2: f64, sigma2: f64) -> Result<SensingMatrix, EchoError> {
    if sigma2 <= 0.0 {
        return Err(EchoError::NonPositiveNoise);
    }
    let hh = outer(h_ta, h_ta);
    let s = &hh * w_sum * &hh * c(kappa2 / (2.0 * sigma2), 0.0);
    Ok(SensingMatrix { s: hermitian_part(&s) })
}

/// Reduces a Hermitian matrix to real symmetric tridiagonal form
/// `T = Qᴴ S Q` by Householder reflections; returns `(diag, offdiag, Q)`.
fn tridiagonalize(s: &CMat) -> (Vec<f64>, Vec<f64>, CMat) {
    let n = s.nrows();
    let mut a = s.clone();
    let mut q = CMat::identity(n, n);
    for k in 0..n.saturating_sub(2) {
        let x = a.view((k + 1, k), (n - k - 1, 1)).clone_owned();
        let alpha = x.norm();
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { c(1.0, 0.0) };
        let mut v = x.clone();
        v[0] += phase * alpha;
        let vn = v.norm();
        if vn == 0.0 {
            continue;
        }
        v /= c(vn, 0.0);
        let mut h = CMat::identity(n, n);
        let block = CMat::identity(n - k - 1, n - k - 1) - (&v * v.adjoint()) * c(2.0, 0.0);
        h.view_mut((k + 1, k + 1), (n - k - 1, n - k - 1)).copy_from(&block);
        a = &h * &a * &h;
        q = &q * &h;
    }
    // Rotate the complex off-diagonal entries onto the real axis.
    let mut phases = vec![c(1.0, 0.0); n];
    for k in 1..n {
        let e = a[(k, k - 1)];
        phases[k] = if e.norm() > 0.0 { phases[k - 1] * e / e.norm() } else { phases[k - 1] };
    }
    let d = CMat::from_diagonal(&CVec::from_vec(phases));
    let a = d.adjoint() * &a * &d;
    let q = q * d;
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    let off = (1..n).map(|i| a[(i, i - 1)].re).collect();
    (diag, off, q)
}

/// Dominant eigenpair of a Hermitian matrix by implicit-shift QR iteration
/// with Wilkinson shifts. Stops when successive estimates of the largest
/// eigenvalue differ by at most `tol` and every off-diagonal entry has
/// deflated, or after `max_iter` sweeps. The zero matrix returns `(0, e₁)`.
pub fn dominant_eigenpair(s: &CMat, tol: f64, max_iter: usize) -> Result<(f64, CVec), EchoError> {
    let n = s.nrows();
    let scale = s.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let defect = hermitian_defect(s);
    if defect > 1e-12 * scale.max(1.0) {
        return Err(EchoError::NotHermitian(defect));
    }
    let mut e1 = CVec::zeros(n);
    if n > 0 {
        e1[0] = c(1.0, 0.0);
    }
    if scale == 0.0 || n == 0 {
        return Ok((0.0, e1));
    }
    let (d, e, mut q) = tridiagonalize(s);
    let mut t = nalgebra::DMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_vec(d));
    for (k, &v) in e.iter().enumerate() {
        t[(k + 1, k)] = v;
        t[(k, k + 1)] = v;
    }
    let small = |t: &nalgebra::DMatrix<f64>, k: usize| {
        t[(k + 1, k)].abs() <= f64::EPSILON * (t[(k, k)].abs() + t[(k + 1, k + 1)].abs()).max(scale * f64::EPSILON)
    };
    let mut prev = f64::NAN;
    let mut hi = n - 1;
    for _ in 0..max_iter {
        while hi > 0 && small(&t, hi - 1) {
            hi -= 1;
        }
        let lam = t.diagonal().max();
        let converged = (lam - prev).abs() <= tol;
        prev = lam;
        if hi == 0 && converged {
            break;
        }
        if hi == 0 {
            continue;
        }
        let mut lo = hi - 1;
        while lo > 0 && !small(&t, lo - 1) {
            lo -= 1;
        }
        // Wilkinson shift from the trailing 2×2 block of the active window.
        let delta = (t[(hi - 1, hi - 1)] - t[(hi, hi)]) / 2.0;
        let b2 = t[(hi, hi - 1)].powi(2);
        let sign = if delta >= 0.0 { 1.0 } else { -1.0 };
        let mu = t[(hi, hi)] - b2 / (delta + sign * (delta * delta + b2).sqrt());
        // Implicit shifted QR sweep: chase the bulge down the window.
        let mut x = t[(lo, lo)] - mu;
        let mut z = t[(lo + 1, lo)];
        for k in lo..hi {
            let r = x.hypot(z);
            if r == 0.0 {
                break;
            }
            let (cs, sn) = (x / r, z / r);
            for j in 0..n {
                let (a, b) = (t[(k, j)], t[(k + 1, j)]);
                t[(k, j)] = cs * a + sn * b;
                t[(k + 1, j)] = -sn * a + cs * b;
            }
            for j in 0..n {
                let (a, b) = (t[(j, k)], t[(j, k + 1)]);
                t[(j, k)] = cs * a + sn * b;
                t[(j, k + 1)] = -sn * a + cs * b;
            }
            for j in 0..n {
                let (a, b) = (q[(j, k)], q[(j, k + 1)]);
                q[(j, k)] = a * cs + b * sn;
                q[(j, k + 1)] = -a * sn + b * cs;
            }
            if k + 1 < hi {
                x = t[(k + 1, k)];
                z = t[(k + 2, k)];
            }
        }
    }
    let imax = t.diagonal().argmax().0;
    let lam = t[(imax, imax)];
    let mut a = q.column(imax).clone_owned();
    let nrm = a.norm();
    a /= c(nrm, 0.0);
    Ok((lam, a))
}

/// Rank-1 fast path: `S ∝ h_ta h_taᴴ`, so its dominant eigenvector is `h_ta/‖h_ta‖`.
pub fn matched_filter(h_ta: &CVec) -> CVec {
    let n = h_ta.norm();
    if n == 0.0 {
        let mut e1 = CVec::zeros(h_ta.len());
        e1[0] = c(1.0, 0.0);
        return e1;
    }
    h_ta / c(n, 0.0)
}

/// Eigenvalue of the rank-1 sensing matrix, `(κ²/2σ²)·‖h_ta‖²·h_taᴴ W h_ta`.
pub fn rank1_eigenvalue(h_ta: &CVec, w_sum: &CMat, kappa2: f64, sigma2: f64) -> f64 {
    kappa2 / (2.0 * sigma2) * h_ta.norm_squared() * quad(h_ta, w_sum)
}

pub const EIG_TOL: f64 = 1e-9;
pub const EIG_MAX_ITER: usize = 500;

/// Echo filter for given covariances via the QR path; falls back to the
/// matched filter when `S` vanishes. Returns `(λ_max, a)`.
pub fn echo_filter(h_ta: &CVec, w_sum: &CMat, kappa2: f64, sigma2: f64) -> Result<(f64, CVec), EchoError> {
    let s = build_sensing_matrix_lifted(h_ta, w_sum, kappa2, sigma2)?;
    let (lam, a) = dominant_eigenpair(&s.s, EIG_TOL * rank1_eigenvalue(h_ta, w_sum, kappa2, sigma2).max(1.0), EIG_MAX_ITER)?;
    if lam <= 0.0 {
        return Ok((lam, matched_filter(h_ta)));
    }
    Ok((lam, a))
}
