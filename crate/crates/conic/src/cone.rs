//! Symmetric cones, their Jordan-algebra helpers and Nesterov-Todd scalings.
//!
//! Every cone vector is stored flat. PSD blocks use `svec` storage (lower
//! triangle, column major, off-diagonals scaled by √2) so the Euclidean inner
//! product on the flat vector equals the trace inner product.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// One factor of the product cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cone {
    /// Nonnegative orthant of the given dimension.
    Nonneg(usize),
    /// Second-order cone `{(t, x) : t ≥ ‖x‖}` of the given total dimension.
    Soc(usize),
    /// Real symmetric PSD cone of the given matrix order.
    Psd(usize),
}

impl Cone {
    /// Length of the flat storage.
    pub fn dim(&self) -> usize {
        match *self {
            Cone::Nonneg(n) | Cone::Soc(n) => n,
            Cone::Psd(k) => k * (k + 1) / 2,
        }
    }

    /// Barrier degree.
    pub fn degree(&self) -> usize {
        match *self {
            Cone::Nonneg(n) => n,
            Cone::Soc(_) => 1,
            Cone::Psd(k) => k,
        }
    }
}

/// Flat index of entry `(r, c)`, `r ≥ c`, in an order-`k` svec.
pub fn svec_index(k: usize, r: usize, c: usize) -> usize {
    debug_assert!(r >= c && r < k);
    c * (2 * k + 1 - c) / 2 + (r - c)
}

/// Symmetric matrix to svec.
pub fn svec(m: &DMatrix<f64>) -> Vec<f64> {
    let k = m.nrows();
    let mut v = Vec::with_capacity(k * (k + 1) / 2);
    for c in 0..k {
        for r in c..k {
            if r == c {
                v.push(m[(r, c)]);
            } else {
                v.push(SQRT2 * 0.5 * (m[(r, c)] + m[(c, r)]));
            }
        }
    }
    v
}

/// svec to symmetric matrix.
pub fn smat(v: &[f64], k: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(k, k);
    let mut i = 0;
    for c in 0..k {
        for r in c..k {
            if r == c {
                m[(r, c)] = v[i];
            } else {
                let x = v[i] / SQRT2;
                m[(r, c)] = x;
                m[(c, r)] = x;
            }
            i += 1;
        }
    }
    m
}

/// svec of `diag(d)`.
pub fn diag_svec(d: &[f64]) -> Vec<f64> {
    let k = d.len();
    let mut v = vec![0.0; k * (k + 1) / 2];
    for (j, x) in d.iter().enumerate() {
        v[svec_index(k, j, j)] = *x;
    }
    v
}

fn sym_eigenvalues(m: &DMatrix<f64>) -> DVector<f64> {
    m.clone().symmetric_eigenvalues()
}

/// Identity element of the cone, written into `out`.
pub fn identity(cone: Cone, out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    match cone {
        Cone::Nonneg(_) => out.iter_mut().for_each(|x| *x = 1.0),
        Cone::Soc(_) => out[0] = 1.0,
        Cone::Psd(k) => {
            for j in 0..k {
                out[svec_index(k, j, j)] = 1.0;
            }
        }
    }
}

/// Largest amount by which `x` fails to be in the cone (negative when interior).
pub fn violation(cone: Cone, x: &[f64]) -> f64 {
    match cone {
        Cone::Nonneg(_) => x.iter().map(|v| -v).fold(f64::NEG_INFINITY, f64::max),
        Cone::Soc(_) => {
            let n1 = x[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
            n1 - x[0]
        }
        Cone::Psd(k) => -sym_eigenvalues(&smat(x, k)).min(),
    }
}

/// Jordan product `u ∘ v`.
pub fn jordan_product(cone: Cone, u: &[f64], v: &[f64], out: &mut [f64]) {
    match cone {
        Cone::Nonneg(_) => {
            for i in 0..u.len() {
                out[i] = u[i] * v[i];
            }
        }
        Cone::Soc(_) => {
            out[0] = u.iter().zip(v).map(|(a, b)| a * b).sum();
            for i in 1..u.len() {
                out[i] = u[0] * v[i] + v[0] * u[i];
            }
        }
        Cone::Psd(k) => {
            let a = smat(u, k);
            let b = smat(v, k);
            let p = &a * &b;
            let sym = (&p + p.transpose()) * 0.5;
            out.copy_from_slice(&svec(&sym));
        }
    }
}

/// Solves `λ ∘ u = v` for `u` given a scaled point `λ`; for PSD blocks `λ` is
/// diagonal with entries `lam_diag`.
pub fn inverse_product(cone: Cone, lam: &[f64], lam_diag: &[f64], v: &[f64], out: &mut [f64]) {
    match cone {
        Cone::Nonneg(_) => {
            for i in 0..v.len() {
                out[i] = v[i] / lam[i];
            }
        }
        Cone::Soc(_) => {
            let det = lam[0] * lam[0] - lam[1..].iter().map(|x| x * x).sum::<f64>();
            let dot: f64 = lam[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum();
            let u0 = (lam[0] * v[0] - dot) / det;
            out[0] = u0;
            for i in 1..v.len() {
                out[i] = (v[i] - u0 * lam[i]) / lam[0];
            }
        }
        Cone::Psd(k) => {
            let mut i = 0;
            for c in 0..k {
                for r in c..k {
                    out[i] = 2.0 * v[i] / (lam_diag[r] + lam_diag[c]);
                    i += 1;
                }
            }
        }
    }
}

/// Largest `α ≥ 0` with `x + α d` in the cone, for `x` interior (`∞` if unbounded).
pub fn max_step(cone: Cone, x: &[f64], x_diag: &[f64], d: &[f64]) -> f64 {
    match cone {
        Cone::Nonneg(_) => {
            let mut a = f64::INFINITY;
            for i in 0..x.len() {
                if d[i] < 0.0 {
                    a = a.min(-x[i] / d[i]);
                }
            }
            a
        }
        Cone::Soc(_) => soc_max_step(x, d),
        Cone::Psd(k) => {
            let dm = smat(d, k);
            let mut t = DMatrix::zeros(k, k);
            for r in 0..k {
                for c in 0..k {
                    t[(r, c)] = dm[(r, c)] / (x_diag[r] * x_diag[c]).sqrt();
                }
            }
            let lmin = sym_eigenvalues(&t).min();
            if lmin < 0.0 {
                -1.0 / lmin
            } else {
                f64::INFINITY
            }
        }
    }
}

fn soc_max_step(x: &[f64], d: &[f64]) -> f64 {
    let n1 = |v: &[f64]| v[1..].iter().map(|a| a * a).sum::<f64>();
    let c = x[0] * x[0] - n1(x);
    let a = d[0] * d[0] - n1(d);
    let dot: f64 = x[1..].iter().zip(&d[1..]).map(|(p, q)| p * q).sum();
    let b = 2.0 * (x[0] * d[0] - dot);
    let mut best = f64::INFINITY;
    if a.abs() <= 1e-300 {
        if b < 0.0 {
            best = -c / b;
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let q = -0.5 * (b + b.signum() * sq);
            for r in [q / a, if q != 0.0 { c / q } else { f64::INFINITY }] {
                if r > 0.0 && r < best {
                    best = r;
                }
            }
        }
    }
    if d[0] < 0.0 {
        best = best.min(-x[0] / d[0]);
    }
    best
}

/// Nesterov-Todd scaling of one cone block.
#[derive(Clone, Debug)]
pub enum Scaling {
    /// `W = diag(d)`.
    Nonneg { d: Vec<f64> },
    /// `W = β·H(w̄)` with `w̄ᵀJw̄ = 1`.
    Soc { beta: f64, wbar: Vec<f64> },
    /// `W(z) = Rᵀ z R`, `W⁻ᵀ(s) = R⁻¹ s R⁻ᵀ`.
    Psd { r: DMatrix<f64>, rinv: DMatrix<f64> },
}

/// Error raised when a point is not strictly interior.
#[derive(Debug, Clone, Copy)]
pub struct NotInterior;

impl Scaling {
    /// Scaling for a nonnegative or second-order block computed from scratch,
    /// together with the scaled point `λ`.
    pub fn from_points(cone: Cone, s: &[f64], z: &[f64]) -> Result<(Scaling, Vec<f64>), NotInterior> {
        match cone {
            Cone::Nonneg(_) => {
                if s.iter().chain(z).any(|v| *v <= 0.0) {
                    return Err(NotInterior);
                }
                let d: Vec<f64> = s.iter().zip(z).map(|(a, b)| (a / b).sqrt()).collect();
                let lam = s.iter().zip(z).map(|(a, b)| (a * b).sqrt()).collect();
                Ok((Scaling::Nonneg { d }, lam))
            }
            Cone::Soc(_) => {
                let jn = |v: &[f64]| v[0] * v[0] - v[1..].iter().map(|a| a * a).sum::<f64>();
                let (sj, zj) = (jn(s), jn(z));
                if sj <= 0.0 || zj <= 0.0 || s[0] <= 0.0 || z[0] <= 0.0 {
                    return Err(NotInterior);
                }
                let (sn, zn) = (sj.sqrt(), zj.sqrt());
                let sb: Vec<f64> = s.iter().map(|v| v / sn).collect();
                let zb: Vec<f64> = z.iter().map(|v| v / zn).collect();
                let sz: f64 = sb.iter().zip(&zb).map(|(a, b)| a * b).sum();
                let gamma = ((1.0 + sz) / 2.0).sqrt();
                let mut wbar: Vec<f64> = Vec::with_capacity(s.len());
                wbar.push((sb[0] + zb[0]) / (2.0 * gamma));
                for i in 1..s.len() {
                    wbar.push((sb[i] - zb[i]) / (2.0 * gamma));
                }
                let beta = (sn / zn).sqrt();
                let sc = Scaling::Soc { beta, wbar };
                let mut lam = vec![0.0; s.len()];
                sc.apply_w(z, &mut lam);
                Ok((sc, lam))
            }
            Cone::Psd(k) => {
                let eye = DMatrix::identity(k, k);
                let (sc, diag) = Scaling::psd_update(&eye, &eye, &smat(s, k), &smat(z, k))?;
                Ok((sc, diag_svec(&diag)))
            }
        }
    }

    /// Composes an existing PSD scaling `(r, rinv)` with the scaling of the
    /// scaled iterates `(s̃, z̃)`. Returns the new scaling and the diagonal of `λ`.
    pub fn psd_update(
        r: &DMatrix<f64>,
        rinv: &DMatrix<f64>,
        st: &DMatrix<f64>,
        zt: &DMatrix<f64>,
    ) -> Result<(Scaling, Vec<f64>), NotInterior> {
        let l1 = Cholesky::new(st.clone()).ok_or(NotInterior)?.unpack();
        let l2 = Cholesky::new(zt.clone()).ok_or(NotInterior)?.unpack();
        let m = l2.transpose() * &l1;
        let svd = m.svd(true, true);
        let u = svd.u.ok_or(NotInterior)?;
        let vt = svd.v_t.ok_or(NotInterior)?;
        let sig = svd.singular_values;
        if sig.iter().any(|x| *x <= 0.0 || !x.is_finite()) {
            return Err(NotInterior);
        }
        let k = sig.len();
        let mut isq = DMatrix::zeros(k, k);
        for i in 0..k {
            isq[(i, i)] = 1.0 / sig[i].sqrt();
        }
        let rt = &l1 * vt.transpose() * &isq;
        let rtinv = &isq * u.transpose() * l2.transpose();
        let r_new = r * rt;
        let rinv_new = rtinv * rinv;
        Ok((Scaling::Psd { r: r_new, rinv: rinv_new }, sig.iter().copied().collect()))
    }

    /// `W v`.
    pub fn apply_w(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Nonneg { d } => {
                for i in 0..v.len() {
                    out[i] = d[i] * v[i];
                }
            }
            Scaling::Soc { beta, wbar } => soc_h(wbar, v, out, *beta, false),
            Scaling::Psd { r, .. } => {
                let k = r.nrows();
                let m = r.transpose() * smat(v, k) * r;
                out.copy_from_slice(&svec(&m));
            }
        }
    }

    /// `Wᵀ v`.
    pub fn apply_wt(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Psd { r, .. } => {
                let k = r.nrows();
                let m = r * smat(v, k) * r.transpose();
                out.copy_from_slice(&svec(&m));
            }
            _ => self.apply_w(v, out),
        }
    }

    /// `W⁻¹ v`.
    pub fn apply_winv(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Nonneg { d } => {
                for i in 0..v.len() {
                    out[i] = v[i] / d[i];
                }
            }
            Scaling::Soc { beta, wbar } => soc_h(wbar, v, out, 1.0 / *beta, true),
            Scaling::Psd { rinv, .. } => {
                let k = rinv.nrows();
                let m = rinv.transpose() * smat(v, k) * rinv;
                out.copy_from_slice(&svec(&m));
            }
        }
    }

    /// `W⁻ᵀ v`.
    pub fn apply_winv_t(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Scaling::Psd { rinv, .. } => {
                let k = rinv.nrows();
                let m = rinv * smat(v, k) * rinv.transpose();
                out.copy_from_slice(&svec(&m));
            }
            _ => self.apply_winv(v, out),
        }
    }
}

// out = scale * H(w) v, or scale * J H(w) J v when `inverse`.
fn soc_h(w: &[f64], v: &[f64], out: &mut [f64], scale: f64, inverse: bool) {
    let sgn = if inverse { -1.0 } else { 1.0 };
    let w0 = w[0];
    let wv1: f64 = w[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum();
    out[0] = scale * (w0 * v[0] + sgn * wv1);
    let coef = sgn * v[0] + wv1 / (1.0 + w0);
    for i in 1..v.len() {
        out[i] = scale * (v[i] + coef * w[i]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
    }

    fn check_scaling(cone: Cone, s: &[f64], z: &[f64]) {
        let (w, lam) = Scaling::from_points(cone, s, z).unwrap();
        let n = s.len();
        let (mut wz, mut wis, mut back) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        w.apply_w(z, &mut wz);
        w.apply_winv_t(s, &mut wis);
        assert!(close(&wz, &lam, 1e-10), "{wz:?} vs {lam:?}");
        assert!(close(&wis, &lam, 1e-10), "{wis:?} vs {lam:?}");
        w.apply_winv(&wz, &mut back);
        assert!(close(&back, z, 1e-10));
    }

    #[test]
    fn nt_scaling_nonneg() {
        check_scaling(Cone::Nonneg(3), &[1.0, 2.0, 0.5], &[3.0, 0.1, 1.0]);
    }

    #[test]
    fn nt_scaling_soc() {
        check_scaling(Cone::Soc(4), &[3.0, 1.0, -0.5, 2.0], &[2.0, -0.3, 1.2, 0.4]);
    }

    #[test]
    fn nt_scaling_psd() {
        let s = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let z = DMatrix::from_row_slice(3, 3, &[1.0, -0.3, 0.0, -0.3, 2.0, 0.4, 0.0, 0.4, 1.5]);
        check_scaling(Cone::Psd(3), &svec(&s), &svec(&z));
    }

    #[test]
    fn svec_index_matches_layout() {
        let k = 4;
        let mut i = 0;
        for c in 0..k {
            for r in c..k {
                assert_eq!(svec_index(k, r, c), i);
                i += 1;
            }
        }
    }

    #[test]
    fn inverse_product_inverts_jordan_product() {
        let lam = [2.0, 0.5, -0.7];
        let u = [0.3, -1.0, 2.0];
        let mut v = [0.0; 3];
        jordan_product(Cone::Soc(3), &lam, &u, &mut v);
        let mut back = [0.0; 3];
        inverse_product(Cone::Soc(3), &lam, &[], &v, &mut back);
        assert!(close(&back, &u, 1e-12));
    }

    #[test]
    fn soc_step_hits_boundary() {
        let x = [2.0, 0.0, 0.0];
        let d = [-1.0, 1.0, 0.0];
        let a = max_step(Cone::Soc(3), &x, &[], &d);
        let p: Vec<f64> = x.iter().zip(&d).map(|(u, v)| u + a * v).collect();
        assert!(violation(Cone::Soc(3), &p).abs() < 1e-12);
    }
}
