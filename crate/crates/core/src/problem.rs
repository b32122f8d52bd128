//! Noise-normalized problem data shared by the BS1, BS2 and initialization
//! programs.
//!
//! Every quantity of the design problem that is linear in the transmit
//! covariances is an [`Affine`] over the variables `[W_bo, W_ta, O_c,
//! O_1, .., O_N]`. A subproblem picks which variables are free; the others
//! are folded into the constant at their current value. Channel matrices
//! are divided by `σ²`, so noise power is 1 and traces are in units of
//! noise power per watt.

use conic::LinExpr;

use crate::linalg::{c, identity, outer, re_trace, CMat};
use crate::metrics::LiftedBeams;
use crate::sysmodel::{ChannelSet, SystemConfig};

pub const W_BO: usize = 0;
pub const W_TA: usize = 1;
pub const O_C: usize = 2;

/// Index of the private covariance of user `k` (0-based).
pub fn o_p(k: usize) -> usize {
    3 + k
}

/// Floor on the worst-case interference-plus-noise at Eve, in noise units,
/// below which the worst-case wiretap SINR is unbounded.
pub const EVE_FLOOR: f64 = 0.1;

/// `constant + Σ_v Re Tr(C_v X_v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub coef: Vec<Option<CMat>>,
    pub constant: f64,
}

impl Affine {
    pub fn constant(nvars: usize, value: f64) -> Self {
        Self { coef: vec![None; nvars], constant: value }
    }

    pub fn term(mut self, var: usize, m: &CMat, scale: f64) -> Self {
        let add = m * c(scale, 0.0);
        self.coef[var] = Some(match self.coef[var].take() {
            Some(old) => old + add,
            None => add,
        });
        self
    }

    pub fn add_const(mut self, v: f64) -> Self {
        self.constant += v;
        self
    }

    pub fn plus(mut self, other: &Affine, scale: f64) -> Self {
        self.constant += scale * other.constant;
        for (v, m) in other.coef.iter().enumerate() {
            if let Some(m) = m {
                self = self.term(v, m, scale);
            }
        }
        self
    }

    pub fn scaled(&self, s: f64) -> Self {
        Affine::constant(self.coef.len(), 0.0).plus(self, s)
    }

    pub fn eval(&self, x: &[&CMat]) -> f64 {
        self.constant + self.coef.iter().zip(x).filter_map(|(m, xv)| m.as_ref().map(|m| re_trace(m, xv))).sum::<f64>()
    }

    pub fn depends_on(&self, free: &[Option<usize>]) -> bool {
        self.coef.iter().zip(free).any(|(m, b)| m.is_some() && b.is_some())
    }

    /// Conic expression with `free[v] = Some(block)` for free variables;
    /// fixed variables contribute their value at `x`.
    pub fn to_expr(&self, free: &[Option<usize>], x: &[&CMat]) -> LinExpr {
        let mut e = LinExpr::constant(self.constant);
        for (v, m) in self.coef.iter().enumerate() {
            if let Some(m) = m {
                match free[v] {
                    Some(block) => e = e.re_trace(block, m),
                    None => e.constant += re_trace(m, x[v]),
                }
            }
        }
        e
    }

    /// Rough magnitude at power level `p` per variable, for row scaling.
    pub fn magnitude(&self, p: &[f64]) -> f64 {
        self.coef
            .iter()
            .zip(p)
            .filter_map(|(m, pv)| m.as_ref().map(|m| m.norm() * pv))
            .fold(self.constant.abs(), f64::max)
    }
}

pub fn vars(x: &LiftedBeams) -> Vec<&CMat> {
    let mut v = vec![&x.w_bo, &x.w_ta, &x.o_c];
    v.extend(x.o_p.iter());
    v
}

/// Normalized channel matrices and thresholds for one channel set and filter.
#[derive(Debug, Clone)]
pub struct Problem {
    pub m1: usize,
    pub m2: usize,
    pub n: usize,
    pub h_bo: CMat,
    pub h_es: CMat,
    pub h_e_max: CMat,
    pub h_e_min: CMat,
    pub h_ta: CMat,
    pub h_n: Vec<CMat>,
    pub g_bo: CMat,
    pub g_e_max: CMat,
    pub g_e_min: CMat,
    pub g_n: Vec<CMat>,
    /// `(h_bo h_esᴴ + e_h_UB·I)/σ²`.
    pub h_tilde: CMat,
    /// `SCNR = echo_coef·Tr(H_ta (W_bo + W_ta))`.
    pub echo_coef: f64,
    pub tau: f64,
    pub p1_max: f64,
    pub p2_max: f64,
    pub p0: f64,
    pub gamma_th: f64,
    pub i_s: f64,
    pub i_c: f64,
    pub i_p: f64,
}

impl Problem {
    pub fn new(cfg: &SystemConfig, ch: &ChannelSet, a: &crate::linalg::CVec) -> Self {
        let s = 1.0 / cfg.sigma2;
        let unc = ch.uncertainty();
        let norm = |v: &crate::linalg::CVec| outer(v, v) * c(s, 0.0);
        let (m1, m2) = (ch.h_bo.len(), ch.g_bo.len());
        let h_es = norm(&ch.h_es);
        let g_es = norm(&ch.g_es);
        let eh = identity(m1) * c(unc.e_h_ub * s, 0.0);
        let eg = identity(m2) * c(unc.e_g_ub * s, 0.0);
        let a2 = a.norm_squared().max(f64::MIN_POSITIVE);
        Self {
            m1,
            m2,
            n: ch.n_users(),
            h_bo: norm(&ch.h_bo),
            h_e_max: &h_es + &eh,
            h_e_min: &h_es - &eh,
            h_es,
            h_ta: norm(&ch.h_ta),
            h_n: ch.h_n.iter().map(norm).collect(),
            g_bo: norm(&ch.g_bo),
            g_e_max: &g_es + &eg,
            g_e_min: &g_es - &eg,
            g_n: ch.g_n.iter().map(norm).collect(),
            h_tilde: outer(&ch.h_bo, &ch.h_es) * c(s, 0.0) + &eh,
            echo_coef: cfg.kappa2 * a.dotc(&ch.h_ta).norm_sqr() / (2.0 * a2),
            tau: 2f64.powf(cfg.i_s),
            p1_max: cfg.p1_max,
            p2_max: cfg.p2_max,
            p0: cfg.p0,
            gamma_th: cfg.gamma_th,
            i_s: cfg.i_s,
            i_c: cfg.i_c,
            i_p: cfg.i_p,
        }
    }

    pub fn nvars(&self) -> usize {
        3 + self.n
    }

    fn zero(&self) -> Affine {
        Affine::constant(self.nvars(), 0.0)
    }

    /// Typical power per variable for row scaling.
    pub fn power_scale(&self) -> Vec<f64> {
        let mut p = vec![self.p1_max, self.p1_max];
        p.extend(std::iter::repeat_n(self.p2_max, self.n + 1));
        p
    }

    fn bs2_sum(&self, m: &CMat, scale: f64) -> Affine {
        (0..=self.n).fold(self.zero(), |a, k| a.term(O_C + k, m, scale))
    }

    fn bs1_sum(&self, m: &CMat, scale: f64) -> Affine {
        self.zero().term(W_BO, m, scale).term(W_TA, m, scale)
    }

    pub fn p1(&self) -> Affine {
        self.bs1_sum(&identity(self.m1), 1.0)
    }

    pub fn p2(&self) -> Affine {
        self.bs2_sum(&identity(self.m2), 1.0)
    }

    /// `Tr(H_bo W_bo)`.
    pub fn bob_signal(&self) -> Affine {
        self.zero().term(W_BO, &self.h_bo, 1.0)
    }

    pub fn bob_sensing(&self) -> Affine {
        self.zero().term(W_TA, &self.h_bo, 1.0)
    }

    /// `Tr(G_bo O_sum)`.
    pub fn bob_bs2(&self) -> Affine {
        self.bs2_sum(&self.g_bo, 1.0)
    }

    pub fn x_max(&self) -> Affine {
        self.zero().term(W_BO, &self.h_e_max, 1.0)
    }

    pub fn x_min(&self) -> Affine {
        self.zero().term(W_BO, &self.h_e_min, 1.0)
    }

    pub fn y_max(&self) -> Affine {
        self.zero().term(W_TA, &self.h_e_max, 1.0)
    }

    pub fn y_min(&self) -> Affine {
        self.zero().term(W_TA, &self.h_e_min, 1.0)
    }

    pub fn eve_bs2_min(&self) -> Affine {
        self.bs2_sum(&self.g_e_min, 1.0)
    }

    pub fn eve_bs2_max(&self) -> Affine {
        self.bs2_sum(&self.g_e_max, 1.0)
    }

    /// `z1 = Tr(H_bo W_bo) + Tr(G_bo O_sum) + 1`.
    pub fn z1(&self) -> Affine {
        self.bob_signal().plus(&self.bob_bs2(), 1.0).add_const(1.0)
    }

    /// `Tr(G_bo O_sum) + 1`.
    pub fn a_bo(&self) -> Affine {
        self.bob_bs2().add_const(1.0)
    }

    /// `z2 = X_max + Y_min + I_e,min + 1`.
    pub fn z2(&self) -> Affine {
        self.x_max().plus(&self.z3(), 1.0)
    }

    /// `z3 = Y_min + I_e,min + 1`.
    pub fn z3(&self) -> Affine {
        self.y_min().plus(&self.eve_bs2_min(), 1.0).add_const(1.0)
    }

    /// Worst-case security rate `log₂(z1/a_bo) − log₂(z2/z3)`; `−∞` when
    /// the worst-case wiretap SINR is unbounded.
    pub fn robust_secrecy(&self, x: &[&CMat]) -> f64 {
        let (z1, a, z2, z3) = (self.z1().eval(x), self.a_bo().eval(x), self.z2().eval(x), self.z3().eval(x));
        if z3 <= 0.0 {
            return f64::NEG_INFINITY;
        }
        (z1 / a).log2() - (z2 / z3).log2()
    }

    pub fn total_power(&self, x: &[&CMat]) -> f64 {
        self.p1().eval(x) + self.p2().eval(x) + self.p0
    }

    /// Optimizer-view SEE of lifted covariances.
    pub fn see(&self, x: &[&CMat]) -> f64 {
        self.robust_secrecy(x).max(0.0) / self.total_power(x)
    }

    /// Every constraint that is linear in the covariances, as `expr ≥ 0`,
    /// each row scaled to unit magnitude.
    pub fn linear_constraints(&self) -> Vec<(String, Affine)> {
        let th = self.gamma_th;
        let mut out = vec![
            ("bs1_power".to_string(), self.p1().scaled(-1.0).add_const(self.p1_max)),
            ("bs2_power".to_string(), self.p2().scaled(-1.0).add_const(self.p2_max)),
            ("bob_decoding_order".to_string(), self.bob_sensing().plus(&self.bob_signal(), -1.0)),
            ("eve_decoding_order".to_string(), self.y_min().plus(&self.x_max(), -1.0)),
            (
                "bob_sensing_sinr".to_string(),
                self.bob_sensing().plus(&self.bob_signal(), -th).plus(&self.bob_bs2(), -th).add_const(-th),
            ),
            (
                "eve_sensing_sinr".to_string(),
                self.x_min().plus(&self.eve_bs2_min(), 1.0).add_const(1.0).scaled(th).plus(&self.y_max(), -1.0),
            ),
            ("echo_scnr".to_string(), self.bs1_sum(&self.h_ta, self.echo_coef).add_const(-th)),
            ("eve_floor".to_string(), self.z3().add_const(-EVE_FLOOR)),
        ];
        let (qc, qp) = (2f64.powf(self.i_c) - 1.0, 2f64.powf(self.i_p) - 1.0);
        for k in 0..self.n {
            let bs1 = self.bs1_sum(&self.h_n[k], 1.0);
            let private_sum = (0..self.n).fold(self.zero(), |a, j| a.term(o_p(j), &self.g_n[k], 1.0));
            let common = self
                .zero()
                .term(O_C, &self.g_n[k], 1.0)
                .plus(&private_sum, -qc)
                .plus(&bs1, -qc)
                .add_const(-qc);
            out.push((format!("common_rate_{}", k + 1), common));
            let others = private_sum.term(o_p(k), &self.g_n[k], -1.0);
            let private = self.zero().term(o_p(k), &self.g_n[k], 1.0).plus(&others, -qp).plus(&bs1, -qp).add_const(-qp);
            out.push((format!("private_rate_{}", k + 1), private));
        }
        let p = self.power_scale();
        out.into_iter()
            .map(|(name, a)| {
                let s = a.magnitude(&p).max(1e-300);
                (name, a.scaled(1.0 / s))
            })
            .collect()
    }

    fn kappa_tau(&self) -> f64 {
        self.tau / (self.tau - 1.0)
    }

    /// `U1 = Tr(H_bo W_bo) + (1−τ)(1 + Tr(G_bo O_sum))`.
    pub fn u1(&self) -> Affine {
        self.bob_signal().plus(&self.a_bo(), 1.0 - self.tau)
    }

    /// `U2` with Eve's channel matrix `h_e` (normalized) and BS2 interference
    /// matrix `g_e`: `τ/(τ−1)·Tr(H_e W_bo) + 1 + Tr(G_e O_sum) + Tr(H_e W_ta)`.
    pub fn u2_with(&self, h_e: &CMat, g_e: &CMat) -> Affine {
        self.zero()
            .term(W_BO, h_e, self.kappa_tau())
            .term(W_TA, h_e, 1.0)
            .plus(&self.bs2_sum(g_e, 1.0), 1.0)
            .add_const(1.0)
    }

    /// Robust security cone `U1 + U2,LB ≥ ‖(2√(τ/(τ−1))·Tr(H̃ W_bo), U2,UB − U1)‖`
    /// with the complex trace split into real and imaginary parts. Both
    /// bounds use `T_e = G_es + e_g_UB·I` for the BS2 interference.
    pub fn robust_security_cone(&self) -> (Affine, Vec<Affine>) {
        let u1 = self.u1();
        let u2_lb = self.u2_with(&self.h_e_min, &self.g_e_max);
        let u2_ub = self.u2_with(&self.h_e_max, &self.g_e_max);
        let k = 2.0 * self.kappa_tau().sqrt();
        let head = u1.clone().plus(&u2_lb, 1.0);
        let re = self.zero().term(W_BO, &self.h_tilde, k);
        let im = self.zero().term(W_BO, &(&self.h_tilde * c(0.0, -1.0)), k);
        (head, vec![re, im, u2_ub.plus(&u1, -1.0)])
    }

    /// Sufficient convex condition for the worst-case security constraint
    /// `(τ−1)·U1·U2w ≥ τ·B·X_max`, using `B·X_max ≤ ((B/c + c·X_max)/2)²`.
    pub fn amgm_security_cone(&self, c_ratio: f64) -> (Affine, Vec<Affine>) {
        let u1 = self.u1();
        let u2w = self.x_max().scaled(self.kappa_tau()).plus(&self.z3(), 1.0);
        let m = self.bob_signal().scaled(0.5 / c_ratio).plus(&self.x_max(), 0.5 * c_ratio);
        let head = u1.clone().plus(&u2w, 1.0);
        (head, vec![m.scaled(2.0 * self.kappa_tau().sqrt()), u1.plus(&u2w, -1.0)])
    }
}

/// Adds `head ≥ ‖tail‖` to a program, scaled to unit magnitude.
pub fn add_cone(
    prog: &mut conic::ConicProgram,
    name: &str,
    cone: &(Affine, Vec<Affine>),
    free: &[Option<usize>],
    x: &[&CMat],
    p: &[f64],
) {
    let (head, tail) = cone;
    let s = tail.iter().fold(head.magnitude(p), |m, t| m.max(t.magnitude(p))).max(1e-300);
    let h = head.to_expr(free, x).scaled(1.0 / s);
    let t = tail.iter().map(|a| a.to_expr(free, x).scaled(1.0 / s)).collect();
    prog.add_soc(name, h, t);
}

/// Adds the hyperbolic constraint `q·z ≥ z0` (with `q, z ≥ 0`) as
/// `q + z ≥ ‖(2√z0, q − z)‖`.
pub fn add_hyperbolic(prog: &mut conic::ConicProgram, name: &str, q: LinExpr, z: LinExpr, z0: f64) {
    let head = q.clone().plus(&z, 1.0);
    let diff = q.plus(&z, -1.0);
    prog.add_soc(name, head, vec![LinExpr::constant(2.0 * z0.sqrt()), diff]);
}

impl Problem {
    /// Largest normalized violation of the constraints shared by every
    /// subproblem: the linear rows, the robust security cone and the
    /// worst-case security rate (in bits).
    pub fn max_violation(&self, x: &[&CMat]) -> f64 {
        let p = self.power_scale();
        let lin = self.linear_constraints().iter().map(|(_, a)| -a.eval(x)).fold(f64::NEG_INFINITY, f64::max);
        let (head, tail) = self.robust_security_cone();
        let s = tail.iter().fold(head.magnitude(&p), |m, a| m.max(a.magnitude(&p))).max(1e-300);
        let tn = tail.iter().map(|a| a.eval(x).powi(2)).sum::<f64>().sqrt();
        lin.max((tn - head.eval(x)) / s).max(self.i_s - self.robust_secrecy(x))
    }
}

/// Settings of one MM/SCA stage.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct StageSettings {
    /// Stop when one step raises SEE by at most `delta`.
    pub delta: f64,
    pub max_iter: usize,
    /// Step halvings toward a non-improving candidate before giving up.
    pub max_halvings: usize,
    /// Stop when the covariances move by at most this relative Frobenius distance.
    pub frob_tol: f64,
    /// Margin subtracted from every constraint row of the convex programs.
    pub backoff: f64,
    /// Largest constraint violation accepted for a new iterate.
    pub accept_tol: f64,
    pub solver: conic::Settings,
}

impl Default for StageSettings {
    fn default() -> Self {
        Self {
            delta: 1e-4,
            max_iter: 50,
            max_halvings: 5,
            frob_tol: 1e-3,
            backoff: 1e-8,
            accept_tol: 1e-7,
            solver: conic::Settings { feas_tol: 1e-9, gap_tol: 1e-9, max_iter: 100 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StageError {
    #[error("subproblem infeasible at the first iteration: {0}")]
    Infeasible(String),
    #[error("iterate is not a valid expansion point: {0}")]
    BadIterate(String),
}

/// Result of an inner MM loop.
#[derive(Debug, Clone)]
pub struct StageOutcome {
    pub x: LiftedBeams,
    /// Optimizer-view SEE at the start and after each accepted step.
    pub see_trace: Vec<f64>,
    /// Surrogate security-rate value reported by each accepted program.
    pub surrogate_trace: Vec<f64>,
    pub iterations: usize,
    /// Why the loop stopped early, if it did.
    pub flag: Option<String>,
}

fn blend(a: &LiftedBeams, b: &LiftedBeams, t: f64) -> LiftedBeams {
    let mix = |p: &CMat, q: &CMat| p * c(1.0 - t, 0.0) + q * c(t, 0.0);
    LiftedBeams {
        a: a.a.clone(),
        w_bo: mix(&a.w_bo, &b.w_bo),
        w_ta: mix(&a.w_ta, &b.w_ta),
        o_c: mix(&a.o_c, &b.o_c),
        o_p: a.o_p.iter().zip(&b.o_p).map(|(p, q)| mix(p, q)).collect(),
    }
}

fn rel_move(a: &LiftedBeams, b: &LiftedBeams) -> f64 {
    let (va, vb) = (vars(a), vars(b));
    let num: f64 = va.iter().zip(&vb).map(|(p, q)| (*p - *q).norm_squared()).sum();
    let den: f64 = vb.iter().map(|q| q.norm_squared()).sum();
    (num / den.max(1e-300)).sqrt()
}

/// Generic monotone MM loop: `step` proposes a candidate and its surrogate
/// value from the current iterate; candidates that lower SEE or break a
/// constraint are pulled back toward the iterate by halving.
pub fn mm_loop(
    prob: &Problem,
    x0: &LiftedBeams,
    settings: &StageSettings,
    mut step: impl FnMut(&LiftedBeams) -> Result<(LiftedBeams, f64), String>,
) -> Result<StageOutcome, StageError> {
    let mut cur = x0.clone();
    let mut see = prob.see(&vars(&cur));
    let mut out = StageOutcome { x: cur.clone(), see_trace: vec![see], surrogate_trace: vec![], iterations: 0, flag: None };
    for it in 0..settings.max_iter {
        let (cand, surrogate) = match step(&cur) {
            Ok(r) => r,
            Err(e) if it == 0 => return Err(StageError::Infeasible(e)),
            Err(e) => {
                out.flag = Some(e);
                break;
            }
        };
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=settings.max_halvings {
            let trial = if t == 1.0 { cand.clone() } else { blend(&cur, &cand, t) };
            let v = vars(&trial);
            let trial_see = prob.see(&v);
            if prob.max_violation(&v) <= settings.accept_tol && trial_see >= see {
                accepted = Some((trial, trial_see));
                break;
            }
            t *= 0.5;
        }
        let Some((next, next_see)) = accepted else {
            out.flag = Some("no ascent step found".into());
            break;
        };
        let moved = rel_move(&next, &cur);
        let gain = next_see - see;
        cur = next;
        see = next_see;
        out.see_trace.push(see);
        out.surrogate_trace.push(surrogate);
        out.iterations += 1;
        if gain <= settings.delta || moved <= settings.frob_tol {
            break;
        }
    }
    out.x = cur;
    Ok(out)
}
