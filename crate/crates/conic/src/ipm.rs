//! Primal-dual interior-point method for the standard-form cone program
//!
//! ```text
//! minimize cᵀx  subject to  Gx + s = h,  Ax = b,  s ∈ K
//! ```
//!
//! with Nesterov-Todd scaling and Mehrotra predictor-corrector steps. The
//! Newton systems are reduced to the dense normal matrix `ĜᵀĜ`, accumulated per
//! cone over the columns that cone actually touches.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::cone::{self, Cone, Scaling};
use crate::SolveError;

/// Standard-form problem data.
#[derive(Clone, Debug)]
pub struct StandardForm {
    pub c: DVector<f64>,
    pub g: DMatrix<f64>,
    pub h: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub cones: Vec<Cone>,
}

/// Solver tolerances and limits.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Settings {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { feas_tol: 1e-7, gap_tol: 1e-7, max_iter: 100 }
    }
}

/// Termination status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Status {
    Optimal,
    MaxIterations,
    InfeasibleSuspected,
}

/// Raw standard-form result.
#[derive(Clone, Debug)]
pub struct StandardSolution {
    pub status: Status,
    pub x: DVector<f64>,
    pub s: DVector<f64>,
    pub y: DVector<f64>,
    pub z: DVector<f64>,
    pub iterations: usize,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub gap: f64,
    pub pres: f64,
    pub dres: f64,
    pub detail: Option<String>,
}

struct Block {
    cone: Cone,
    off: usize,
    dim: usize,
    supp: Vec<usize>,
    gsub: DMatrix<f64>,
}

struct Kkt {
    h: DMatrix<f64>,
    k: Cholesky<f64, Dyn>,
    kinv_at: DMatrix<f64>,
    schur: Option<Cholesky<f64, Dyn>>,
}

fn regularized_cholesky(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    if let Some(c) = Cholesky::new(m.clone()) {
        return Some(c);
    }
    let scale = m.diagonal().iter().fold(0.0_f64, |a, b| a.max(b.abs())).max(1.0);
    let mut eps = 1e-13 * scale;
    for _ in 0..12 {
        let mut r = m.clone();
        for i in 0..r.nrows() {
            r[(i, i)] += eps;
        }
        if let Some(c) = Cholesky::new(r) {
            return Some(c);
        }
        eps *= 10.0;
    }
    None
}

struct Solver<'a> {
    p: &'a StandardForm,
    blocks: Vec<Block>,
    n: usize,
    m: usize,
    degree: f64,
}

struct Iterate {
    x: DVector<f64>,
    s: DVector<f64>,
    y: DVector<f64>,
    z: DVector<f64>,
}

struct ScaledState {
    w: Vec<Scaling>,
    lam: DVector<f64>,
    lam_diag: Vec<Vec<f64>>,
}

impl<'a> Solver<'a> {
    fn new(p: &'a StandardForm) -> Self {
        let n = p.c.len();
        let mut blocks = Vec::with_capacity(p.cones.len());
        let mut off = 0;
        let mut degree = 0.0;
        for &cone in &p.cones {
            let dim = cone.dim();
            let supp: Vec<usize> = (0..n)
                .filter(|&j| (off..off + dim).any(|i| p.g[(i, j)] != 0.0))
                .collect();
            let mut gsub = DMatrix::zeros(dim, supp.len());
            for (jj, &j) in supp.iter().enumerate() {
                for i in 0..dim {
                    gsub[(i, jj)] = p.g[(off + i, j)];
                }
            }
            blocks.push(Block { cone, off, dim, supp, gsub });
            degree += cone.degree() as f64;
            off += dim;
        }
        Solver { p, blocks, n, m: off, degree }
    }

    fn factor(&self, ghat: &[DMatrix<f64>]) -> Option<Kkt> {
        let n = self.n;
        let mut h = DMatrix::zeros(n, n);
        for (blk, gh) in self.blocks.iter().zip(ghat) {
            let hk = gh.tr_mul(gh);
            for (a, &i) in blk.supp.iter().enumerate() {
                for (b, &j) in blk.supp.iter().enumerate() {
                    h[(i, j)] += hk[(a, b)];
                }
            }
        }
        let at = self.p.a.transpose();
        let kmat = &h + &at * &self.p.a;
        let k = regularized_cholesky(&kmat)?;
        let kinv_at = k.solve(&at);
        let schur = if self.p.a.nrows() > 0 {
            let s = &self.p.a * &kinv_at;
            Some(regularized_cholesky(&s)?)
        } else {
            None
        };
        Some(Kkt { h, k, kinv_at, schur })
    }

    fn kkt_solve_once(&self, kkt: &Kkt, rx: &DVector<f64>, ry: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let a = &self.p.a;
        let r1 = rx + a.tr_mul(ry);
        let t = kkt.k.solve(&r1);
        match &kkt.schur {
            Some(sc) => {
                let dy = sc.solve(&(a * &t - ry));
                let dx = t - &kkt.kinv_at * &dy;
                (dx, dy)
            }
            None => (t, DVector::zeros(0)),
        }
    }

    // Solves [H Aᵀ; A 0][dx; dy] = [rx; ry] with two rounds of refinement.
    fn kkt_solve(&self, kkt: &Kkt, rx: &DVector<f64>, ry: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let a = &self.p.a;
        let (mut dx, mut dy) = self.kkt_solve_once(kkt, rx, ry);
        for _ in 0..2 {
            let ex = rx - &kkt.h * &dx - a.tr_mul(&dy);
            let ey = ry - a * &dx;
            let (cx, cy) = self.kkt_solve_once(kkt, &ex, &ey);
            dx += cx;
            dy += cy;
        }
        (dx, dy)
    }

    fn ghat_mul(&self, ghat: &[DMatrix<f64>], x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (blk, gh) in self.blocks.iter().zip(ghat) {
            let xs = DVector::from_iterator(blk.supp.len(), blk.supp.iter().map(|&j| x[j]));
            let v = gh * xs;
            out.rows_mut(blk.off, blk.dim).copy_from(&v);
        }
        out
    }

    fn ghat_tr_mul(&self, ghat: &[DMatrix<f64>], v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.n);
        for (blk, gh) in self.blocks.iter().zip(ghat) {
            let r = gh.tr_mul(&v.rows(blk.off, blk.dim));
            for (a, &j) in blk.supp.iter().enumerate() {
                out[j] += r[a];
            }
        }
        out
    }

    fn scaled_g(&self, st: &ScaledState) -> Vec<DMatrix<f64>> {
        self.blocks
            .iter()
            .zip(&st.w)
            .map(|(blk, w)| {
                let mut gh = DMatrix::zeros(blk.dim, blk.supp.len());
                let mut buf = vec![0.0; blk.dim];
                for j in 0..blk.supp.len() {
                    let col: Vec<f64> = blk.gsub.column(j).iter().copied().collect();
                    w.apply_winv_t(&col, &mut buf);
                    gh.column_mut(j).copy_from_slice(&buf);
                }
                gh
            })
            .collect()
    }

    fn per_block<F: FnMut(&Block, usize)>(&self, mut f: F) {
        for (k, blk) in self.blocks.iter().enumerate() {
            f(blk, k);
        }
    }

    fn identity(&self) -> DVector<f64> {
        let mut e = DVector::zeros(self.m);
        self.per_block(|blk, _| cone::identity(blk.cone, e.as_mut_slice()[blk.off..blk.off + blk.dim].as_mut()));
        e
    }

    fn max_violation(&self, v: &DVector<f64>) -> f64 {
        self.blocks
            .iter()
            .map(|blk| cone::violation(blk.cone, &v.as_slice()[blk.off..blk.off + blk.dim]))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn initial_point(&self) -> Option<Iterate> {
        let ghat: Vec<DMatrix<f64>> = self.blocks.iter().map(|b| b.gsub.clone()).collect();
        let kkt = self.factor(&ghat)?;
        let gth = self.ghat_tr_mul(&ghat, &self.p.h);
        let (x, _) = self.kkt_solve(&kkt, &gth, &self.p.b);
        let mut s = &self.p.h - self.ghat_mul(&ghat, &x);
        let negc = -&self.p.c;
        let (u, y) = self.kkt_solve(&kkt, &negc, &DVector::zeros(self.p.b.len()));
        let mut z = self.ghat_mul(&ghat, &u);
        let e = self.identity();
        for v in [&mut s, &mut z] {
            let ts = self.max_violation(v);
            if ts >= -1e-8 * v.norm().max(1.0) {
                *v += &e * (1.0 + ts);
            }
        }
        Some(Iterate { x, s, y, z })
    }

    fn scalings_from(&self, s: &DVector<f64>, z: &DVector<f64>) -> Option<ScaledState> {
        let mut w = Vec::with_capacity(self.blocks.len());
        let mut lam = DVector::zeros(self.m);
        let mut lam_diag = Vec::with_capacity(self.blocks.len());
        for blk in &self.blocks {
            let r = blk.off..blk.off + blk.dim;
            let (sc, l) = Scaling::from_points(blk.cone, &s.as_slice()[r.clone()], &z.as_slice()[r.clone()]).ok()?;
            lam.as_mut_slice()[r].copy_from_slice(&l);
            lam_diag.push(psd_diag(blk.cone, &l));
            w.push(sc);
        }
        Some(ScaledState { w, lam, lam_diag })
    }

    #[allow(clippy::too_many_arguments)]
    fn newton(
        &self,
        st: &ScaledState,
        ghat: &[DMatrix<f64>],
        kkt: &Kkt,
        bx: &DVector<f64>,
        by: &DVector<f64>,
        bz: &DVector<f64>,
        bs: &DVector<f64>,
    ) -> Direction {
        let mut lbs = DVector::zeros(self.m);
        let mut wbz = DVector::zeros(self.m);
        for (k, blk) in self.blocks.iter().enumerate() {
            let r = blk.off..blk.off + blk.dim;
            cone::inverse_product(
                blk.cone,
                &st.lam.as_slice()[r.clone()],
                &st.lam_diag[k],
                &bs.as_slice()[r.clone()],
                &mut lbs.as_mut_slice()[r.clone()],
            );
            st.w[k].apply_winv_t(&bz.as_slice()[r.clone()], &mut wbz.as_mut_slice()[r]);
        }
        let rhs = bx + self.ghat_tr_mul(ghat, &(&wbz - &lbs));
        let (dx, dy) = self.kkt_solve(kkt, &rhs, by);
        let ds_t = &wbz - self.ghat_mul(ghat, &dx);
        let dz_t = &lbs - &ds_t;
        let mut ds = DVector::zeros(self.m);
        let mut dz = DVector::zeros(self.m);
        for (k, blk) in self.blocks.iter().enumerate() {
            let r = blk.off..blk.off + blk.dim;
            st.w[k].apply_winv(&dz_t.as_slice()[r.clone()], &mut dz.as_mut_slice()[r.clone()]);
            st.w[k].apply_wt(&ds_t.as_slice()[r.clone()], &mut ds.as_mut_slice()[r]);
        }
        Direction { dx, dy, ds, dz, ds_t, dz_t }
    }

    fn step_length(&self, st: &ScaledState, d: &Direction) -> f64 {
        let mut a = f64::INFINITY;
        for (k, blk) in self.blocks.iter().enumerate() {
            let r = blk.off..blk.off + blk.dim;
            let l = &st.lam.as_slice()[r.clone()];
            a = a.min(cone::max_step(blk.cone, l, &st.lam_diag[k], &d.ds_t.as_slice()[r.clone()]));
            a = a.min(cone::max_step(blk.cone, l, &st.lam_diag[k], &d.dz_t.as_slice()[r]));
        }
        a
    }

    fn jordan(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for blk in &self.blocks {
            let r = blk.off..blk.off + blk.dim;
            cone::jordan_product(blk.cone, &u.as_slice()[r.clone()], &v.as_slice()[r.clone()], &mut out.as_mut_slice()[r]);
        }
        out
    }

    fn update_scalings(&self, st: &ScaledState, d: &Direction, alpha: f64, s: &DVector<f64>, z: &DVector<f64>) -> Option<ScaledState> {
        let mut w = Vec::with_capacity(self.blocks.len());
        let mut lam = DVector::zeros(self.m);
        let mut lam_diag = Vec::with_capacity(self.blocks.len());
        for (k, blk) in self.blocks.iter().enumerate() {
            let r = blk.off..blk.off + blk.dim;
            match (blk.cone, &st.w[k]) {
                (Cone::Psd(kk), Scaling::Psd { r: rm, rinv }) => {
                    let l = &st.lam.as_slice()[r.clone()];
                    let st_new: Vec<f64> = l.iter().zip(&d.ds_t.as_slice()[r.clone()]).map(|(a, b)| a + alpha * b).collect();
                    let zt_new: Vec<f64> = l.iter().zip(&d.dz_t.as_slice()[r.clone()]).map(|(a, b)| a + alpha * b).collect();
                    let (sc, diag) = Scaling::psd_update(rm, rinv, &cone::smat(&st_new, kk), &cone::smat(&zt_new, kk)).ok()?;
                    lam.as_mut_slice()[r].copy_from_slice(&cone::diag_svec(&diag));
                    lam_diag.push(diag);
                    w.push(sc);
                }
                _ => {
                    let (sc, l) = Scaling::from_points(blk.cone, &s.as_slice()[r.clone()], &z.as_slice()[r.clone()]).ok()?;
                    lam.as_mut_slice()[r].copy_from_slice(&l);
                    lam_diag.push(Vec::new());
                    w.push(sc);
                }
            }
        }
        Some(ScaledState { w, lam, lam_diag })
    }
}

struct Direction {
    dx: DVector<f64>,
    dy: DVector<f64>,
    ds: DVector<f64>,
    dz: DVector<f64>,
    ds_t: DVector<f64>,
    dz_t: DVector<f64>,
}

fn psd_diag(cone: Cone, l: &[f64]) -> Vec<f64> {
    match cone {
        Cone::Psd(k) => (0..k).map(|j| l[cone::svec_index(k, j, j)]).collect(),
        _ => Vec::new(),
    }
}

fn check(p: &StandardForm) -> Result<(), SolveError> {
    let n = p.c.len();
    let m: usize = p.cones.iter().map(|c| c.dim()).sum();
    if n == 0 {
        return Err(SolveError::IllPosed("no variables".into()));
    }
    if p.g.nrows() != m || p.g.ncols() != n || p.h.len() != m {
        return Err(SolveError::IllPosed(format!(
            "cone rows {m} do not match G {}x{} / h {}",
            p.g.nrows(),
            p.g.ncols(),
            p.h.len()
        )));
    }
    if p.a.ncols() != n || p.a.nrows() != p.b.len() {
        return Err(SolveError::IllPosed("A/b dimensions inconsistent".into()));
    }
    let finite = p.c.iter().chain(p.g.iter()).chain(p.h.iter()).chain(p.a.iter()).chain(p.b.iter()).all(|v| v.is_finite());
    if !finite {
        return Err(SolveError::IllPosed("non-finite coefficient".into()));
    }
    if p.cones.iter().any(|c| c.dim() == 0) {
        return Err(SolveError::IllPosed("empty cone".into()));
    }
    Ok(())
}

/// Solves a standard-form program.
pub fn solve_standard(p: &StandardForm, settings: &Settings) -> Result<StandardSolution, SolveError> {
    check(p)?;
    let sv = Solver::new(p);
    let nb = p.b.norm().max(1.0);
    let nh = p.h.norm().max(1.0);
    let nc = p.c.norm().max(1.0);

    let breakdown = |it: &Iterate, iters: usize, msg: &str| StandardSolution {
        status: Status::MaxIterations,
        x: it.x.clone(),
        s: it.s.clone(),
        y: it.y.clone(),
        z: it.z.clone(),
        iterations: iters,
        primal_obj: p.c.dot(&it.x),
        dual_obj: -p.h.dot(&it.z) - p.b.dot(&it.y),
        gap: it.s.dot(&it.z),
        pres: f64::NAN,
        dres: f64::NAN,
        detail: Some(msg.to_string()),
    };

    let mut it = match sv.initial_point() {
        Some(it) => it,
        None => {
            let zero = Iterate {
                x: DVector::zeros(sv.n),
                s: DVector::zeros(sv.m),
                y: DVector::zeros(p.b.len()),
                z: DVector::zeros(sv.m),
            };
            return Ok(breakdown(&zero, 0, "singular KKT system at initialization"));
        }
    };
    let mut st = match sv.scalings_from(&it.s, &it.z) {
        Some(s) => s,
        None => return Ok(breakdown(&it, 0, "initial point not interior")),
    };

    let e = sv.identity();
    let mut best: Option<(f64, StandardSolution)> = None;
    let mut stall = 0usize;
    let mut last_status_detail: Option<String> = None;

    for iter in 0..=settings.max_iter {
        let rx = p.a.tr_mul(&it.y) + p.g.tr_mul(&it.z) + &p.c;
        let ry = &p.a * &it.x - &p.b;
        let rz = &p.g * &it.x + &it.s - &p.h;
        let pcost = p.c.dot(&it.x);
        let dcost = -p.h.dot(&it.z) - p.b.dot(&it.y);
        let gap = it.s.dot(&it.z);
        let relgap = if pcost < 0.0 {
            gap / -pcost
        } else if dcost > 0.0 {
            gap / dcost
        } else {
            f64::INFINITY
        };
        let pres = (ry.norm() / nb).max(rz.norm() / nh);
        let dres = rx.norm() / nc;

        let snapshot = |status: Status, detail: Option<String>| StandardSolution {
            status,
            x: it.x.clone(),
            s: it.s.clone(),
            y: it.y.clone(),
            z: it.z.clone(),
            iterations: iter,
            primal_obj: pcost,
            dual_obj: dcost,
            gap,
            pres,
            dres,
            detail,
        };

        if pres <= settings.feas_tol && dres <= settings.feas_tol && (gap <= settings.gap_tol || relgap <= settings.gap_tol) {
            return Ok(snapshot(Status::Optimal, None));
        }

        let merit = pres.max(dres).max(gap.min(relgap));
        if best.as_ref().is_none_or(|(m, _)| merit < *m) {
            best = Some((merit, snapshot(Status::MaxIterations, None)));
        }

        // Farkas-type certificates on the current iterate.
        let t = -(p.h.dot(&it.z) + p.b.dot(&it.y));
        if t > 0.0 {
            let r = (p.a.tr_mul(&it.y) + p.g.tr_mul(&it.z)).norm();
            if r <= settings.feas_tol * t && pres > settings.feas_tol {
                return Ok(snapshot(Status::InfeasibleSuspected, Some("primal infeasibility certificate".into())));
            }
        }
        if pcost < 0.0 {
            let r = (&p.g * &it.x + &it.s).norm().max((&p.a * &it.x).norm());
            if r <= settings.feas_tol * -pcost && dres > settings.feas_tol {
                return Ok(snapshot(Status::InfeasibleSuspected, Some("dual infeasibility certificate (unbounded)".into())));
            }
        }

        if iter == settings.max_iter {
            break;
        }

        let ghat = sv.scaled_g(&st);
        let kkt = match sv.factor(&ghat) {
            Some(k) => k,
            None => {
                last_status_detail = Some("singular Newton system".into());
                break;
            }
        };
        let mu = gap / sv.degree;
        let bx = -&rx;
        let by = -&ry;
        let bz = -&rz;
        let lamlam = sv.jordan(&st.lam, &st.lam);

        let aff = sv.newton(&st, &ghat, &kkt, &bx, &by, &bz, &(-&lamlam));
        let a_aff = sv.step_length(&st, &aff).min(1.0);
        let sa = &st.lam + &aff.ds_t * a_aff;
        let za = &st.lam + &aff.dz_t * a_aff;
        let mu_aff = sa.dot(&za) / sv.degree;
        let sigma = if mu > 0.0 { (mu_aff / mu).clamp(0.0, 1.0).powi(3) } else { 0.0 };

        let bs = -&lamlam - sv.jordan(&aff.ds_t, &aff.dz_t) + &e * (sigma * mu);
        let dir = sv.newton(&st, &ghat, &kkt, &bx, &by, &bz, &bs);
        let amax = sv.step_length(&st, &dir);
        let alpha = (0.99 * amax).min(1.0);
        if !alpha.is_finite() || alpha <= 1e-12 {
            stall += 1;
            if stall >= 3 {
                last_status_detail = Some("step length collapsed".into());
                break;
            }
        }

        let x_new = &it.x + &dir.dx * alpha;
        let y_new = &it.y + &dir.dy * alpha;
        let s_new = &it.s + &dir.ds * alpha;
        let z_new = &it.z + &dir.dz * alpha;
        match sv.update_scalings(&st, &dir, alpha, &s_new, &z_new) {
            Some(ns) => st = ns,
            None => {
                last_status_detail = Some("iterate left the cone interior".into());
                break;
            }
        }
        it = Iterate { x: x_new, s: s_new, y: y_new, z: z_new };
    }

    let (_, mut sol) = best.expect("at least one iterate evaluated");
    sol.detail = last_status_detail.or_else(|| Some("iteration limit reached".into()));
    // A stalled run with a dual ray but primal residual far from zero points to infeasibility.
    let t = -(p.h.dot(&sol.z) + p.b.dot(&sol.y));
    if sol.pres > settings.feas_tol.sqrt() && t > 0.0 && sol.dres > settings.feas_tol.sqrt() {
        sol.status = Status::InfeasibleSuspected;
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: &[f64], g: &[&[f64]], h: &[f64]) -> StandardForm {
        let n = c.len();
        let m = g.len();
        StandardForm {
            c: DVector::from_row_slice(c),
            g: DMatrix::from_fn(m, n, |i, j| g[i][j]),
            h: DVector::from_row_slice(h),
            a: DMatrix::zeros(0, n),
            b: DVector::zeros(0),
            cones: vec![Cone::Nonneg(m)],
        }
    }

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + y <= 1, x, y >= 0
        let p = lp(&[-1.0, -2.0], &[&[1.0, 1.0], &[-1.0, 0.0], &[0.0, -1.0]], &[1.0, 0.0, 0.0]);
        let sol = solve_standard(&p, &Settings::default()).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.primal_obj + 2.0).abs() < 1e-6);
        assert!((sol.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn infeasible_lp_is_flagged() {
        // x <= -1 and x >= 0
        let p = lp(&[1.0], &[&[1.0], &[-1.0]], &[-1.0, 0.0]);
        let sol = solve_standard(&p, &Settings::default()).unwrap();
        assert_eq!(sol.status, Status::InfeasibleSuspected);
    }

    #[test]
    fn socp_with_equality() {
        // min t s.t. ‖(x1, x2)‖ ≤ t, x1 + x2 = 2  → t = √2
        let n = 3;
        let mut g = DMatrix::zeros(3, n);
        for i in 0..3 {
            g[(i, i)] = -1.0;
        }
        let p = StandardForm {
            c: DVector::from_row_slice(&[1.0, 0.0, 0.0]),
            g,
            h: DVector::zeros(3),
            a: DMatrix::from_row_slice(1, 3, &[0.0, 1.0, 1.0]),
            b: DVector::from_row_slice(&[2.0]),
            cones: vec![Cone::Soc(3)],
        };
        let sol = solve_standard(&p, &Settings::default()).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.primal_obj - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn real_sdp_min_eigenvalue() {
        // min Tr(C X) s.t. Tr(X) = 1, X ⪰ 0 in svec coordinates.
        let k = 3;
        let c_mat = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0]);
        let dim = k * (k + 1) / 2;
        let c = DVector::from_vec(cone::svec(&c_mat));
        let g = -DMatrix::<f64>::identity(dim, dim);
        let tr = DVector::from_vec(cone::svec(&DMatrix::identity(k, k)));
        let p = StandardForm {
            c,
            g,
            h: DVector::zeros(dim),
            a: DMatrix::from_row_slice(1, dim, tr.as_slice()),
            b: DVector::from_row_slice(&[1.0]),
            cones: vec![Cone::Psd(k)],
        };
        let sol = solve_standard(&p, &Settings::default()).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.primal_obj - 1.0).abs() < 1e-6, "{}", sol.primal_obj);
    }
}
