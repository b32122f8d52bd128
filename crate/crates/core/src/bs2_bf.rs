//! BS2 stage: the RSMA common and private covariances `O_c`, `O_n` for
//! fixed BS1 covariances and echo filter.
//!
//! Auxiliary scalars carry the fractional objective:
//! * `x1`: SEE epigraph value, `x1·x7 ≤ x8²`;
//! * `x2 ≤ log₂ z1`: Bob's total received rate term;
//! * `x3 ≥ log₂ a_bo`: BS2 interference rate at Bob;
//! * `x4 ≥ x5 − x6`: eavesdropping-rate budget;
//! * `x5 ≥ log₂ z2`, `x6 ≤ log₂ z3`: wiretap signal and interference terms;
//! * `x7 ≥ P1 + P2 + P0`: total power;
//! * `x8² ≤ x2 − x3 − x4`: square root of the secured rate.
//!
//! The concave pieces are kept exactly as cones; the convex pieces are
//! replaced by tangents at the current iterate, so each program is a
//! restriction of the true problem that touches it at the iterate.

use std::f64::consts::LN_2;

use conic::{BlockKind, ConicProgram, LinExpr, Status};

use crate::linalg::{c, outer, CMat, CVec};
use crate::metrics::LiftedBeams;
use crate::problem::{add_cone, add_hyperbolic, mm_loop, o_p, vars, Affine, Problem, StageError, StageSettings, O_C, W_BO, W_TA};
use crate::sysmodel::{ChannelSet, SystemConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Bs2Error {
    #[error("security threshold must be positive (tau = {0})")]
    TauTooSmall(f64),
    #[error("expansion points must be positive (x7_0 = {0}, x8_0 = {1})")]
    NonPositiveExpansion(f64, f64),
    #[error("rate terms must be positive at the iterate")]
    NonPositiveRate,
    #[error(transparent)]
    Stage(#[from] StageError),
}

/// `U1 = Tr(H_bo W_bo) + (1−τ)(1 + Tr(G_bo O_sum))` and
/// `U2 = τ/(τ−1)·Tr(H_es W_bo) + 1 + Tr(G_es O_sum) + Tr(H_es W_ta)` with
/// estimated Eve CSI. The security constraint holds iff
/// `(τ−1)·U1·U2 ≥ τ·Tr(H_bo W_bo)·Tr(H_es W_bo)`.
pub fn security_lmi_terms(prob: &Problem) -> Result<(Affine, Affine), Bs2Error> {
    if prob.tau <= 1.0 {
        return Err(Bs2Error::TauTooSmall(prob.tau));
    }
    let g_es = (&prob.g_e_max + &prob.g_e_min) * c(0.5, 0.0);
    Ok((prob.u1(), prob.u2_with(&prob.h_es, &g_es)))
}

/// `(Tr(H_bo W)·Tr(H_e W), |Tr(h_bo h_eᴴ W)|²)` for `W = w wᴴ`; the two agree.
pub fn trace_product_check(h_bo: &CVec, h_e: &CVec, w: &CVec) -> (f64, f64) {
    let (b, e) = (h_bo.dotc(w), h_e.dotc(w));
    let cross = (outer(h_bo, h_e) * outer(w, w)).trace();
    (b.norm_sqr() * e.norm_sqr(), cross.norm_sqr())
}

/// Robust security cone `U1 + U2,LB ≥ ‖(2√(τ/(τ−1))·Tr(H̃ W_bo), U2,UB − U1)‖`.
pub fn security_soc_constraint(prob: &Problem) -> Result<(Affine, Vec<Affine>), Bs2Error> {
    if prob.tau <= 1.0 {
        return Err(Bs2Error::TauTooSmall(prob.tau));
    }
    Ok(prob.robust_security_cone())
}

/// Coefficients of `c8·x8 ≥ c1·x1 + c7·x7`, the tangent restriction of
/// `x1·x7 ≤ x8²` at `(x7_0, x8_0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearBound {
    pub c8: f64,
    pub c1: f64,
    pub c7: f64,
}

impl BilinearBound {
    pub fn slack(&self, x1: f64, x7: f64, x8: f64) -> f64 {
        self.c8 * x8 - self.c1 * x1 - self.c7 * x7
    }
}

pub fn taylor_bilinear_bound(x7_0: f64, x8_0: f64) -> Result<BilinearBound, Bs2Error> {
    if !(x7_0 > 0.0 && x8_0 > 0.0) {
        return Err(Bs2Error::NonPositiveExpansion(x7_0, x8_0));
    }
    Ok(BilinearBound { c8: 2.0 * x7_0 * x8_0, c1: x7_0 * x7_0, c7: x8_0 * x8_0 })
}

/// Tangent of `σ²(2^x − 1)` at `x0`, a global lower bound.
pub fn exp_rate_linearize(x: f64, x0: f64, sigma2: f64) -> f64 {
    sigma2 * (2f64.powf(x0) * (x * LN_2 - x0 * LN_2 + 1.0) - 1.0)
}

#[derive(Debug, Clone)]
pub struct Bs2State {
    pub o_c: CMat,
    pub o_n: Vec<CMat>,
    /// `x1..x7` from the last accepted program.
    pub chi: [f64; 7],
    pub x8: f64,
    pub x3_0: f64,
    pub x6_0: f64,
    pub x7_0: f64,
    pub x8_0: f64,
    pub see_trace: Vec<f64>,
    pub iterations: usize,
    pub flag: Option<String>,
}

/// Expansion point of one program.
#[derive(Debug, Clone, Copy)]
struct Expansion {
    z10: f64,
    z20: f64,
    z30: f64,
    x3_0: f64,
    x7_0: f64,
    x8_0: f64,
}

fn expansion(prob: &Problem, cur: &LiftedBeams) -> Result<Expansion, Bs2Error> {
    let x = vars(cur);
    let (z10, z20, z30, a0) = (prob.z1().eval(&x), prob.z2().eval(&x), prob.z3().eval(&x), prob.a_bo().eval(&x));
    if z10 <= 0.0 || z20 <= 0.0 || z30 <= 0.0 || a0 <= 0.0 {
        return Err(Bs2Error::NonPositiveRate);
    }
    let r = prob.robust_secrecy(&x).max(prob.i_s.max(1e-6));
    Ok(Expansion { z10, z20, z30, x3_0: a0.log2(), x7_0: prob.total_power(&x), x8_0: r.sqrt() })
}

/// One BS2 program around `cur`. Returns the program, the covariance block
/// indices (common first) and the `x1..x8` block indices.
pub fn build_program(prob: &Problem, cur: &LiftedBeams, settings: &StageSettings) -> Result<(ConicProgram, Vec<usize>, [usize; 8]), Bs2Error> {
    let e = expansion(prob, cur)?;
    let x = vars(cur);
    let mut p = ConicProgram::new();
    let mut blocks = vec![p.add_block("O_c", BlockKind::Psd(prob.m2))];
    for k in 0..prob.n {
        blocks.push(p.add_block(&format!("O_{}", k + 1), BlockKind::Psd(prob.m2)));
    }
    let xs: [usize; 8] = std::array::from_fn(|i| p.add_block(&format!("x{}", i + 1), BlockKind::Free));
    let q2 = p.add_block("q2", BlockKind::Free);
    let q6 = p.add_block("q6", BlockKind::Free);
    let v = |i: usize| LinExpr::var(xs[i - 1], 1.0);
    let mut free = vec![None; prob.nvars()];
    free[O_C] = Some(blocks[0]);
    for k in 0..prob.n {
        free[o_p(k)] = Some(blocks[k + 1]);
    }
    debug_assert!(free[W_BO].is_none() && free[W_TA].is_none());

    for (name, a) in prob.linear_constraints() {
        if a.depends_on(&free) {
            p.add_ge(&name, a.to_expr(&free, &x).add_const(-settings.backoff));
        }
    }
    let cone = security_soc_constraint(prob)?;
    add_cone(&mut p, "robust_security", &cone, &free, &x, &prob.power_scale());

    let k = 1.0 / LN_2;
    // x7 ≥ P1 + P2 + P0
    let power = prob.p1().plus(&prob.p2(), 1.0).add_const(prob.p0).to_expr(&free, &x);
    p.add_ge("power_epigraph", v(7).plus(&power, -1.0));
    // x2 ≤ log₂ z10 + (1 − q2)/ln 2 with q2·z1/z10 ≥ 1
    let z1 = prob.z1().to_expr(&free, &x).scaled(1.0 / e.z10);
    add_hyperbolic(&mut p, "log_z1", LinExpr::var(q2, 1.0), z1, 1.0);
    p.add_ge("x2", LinExpr::constant(e.z10.log2() + k).plus(&LinExpr::var(q2, 1.0), -k).plus(&v(2), -1.0));
    // 2^{x3} ≥ a_bo through its tangent at x3_0
    let a_bo = prob.a_bo().to_expr(&free, &x);
    let t = 2f64.powf(e.x3_0);
    p.add_ge(
        "x3",
        v(3).scaled(t * LN_2).add_const(t * (1.0 - e.x3_0 * LN_2)).plus(&a_bo, -1.0).scaled(1.0 / t),
    );
    // x5 ≥ log₂ z20 + (z2/z20 − 1)/ln 2
    let z2 = prob.z2().to_expr(&free, &x).scaled(1.0 / e.z20);
    p.add_ge("x5", v(5).plus(&z2, -k).add_const(k - e.z20.log2()));
    // x6 ≤ log₂ z30 + (1 − q6)/ln 2 with q6·z3/z30 ≥ 1
    let z3 = prob.z3().to_expr(&free, &x).scaled(1.0 / e.z30);
    add_hyperbolic(&mut p, "log_z3", LinExpr::var(q6, 1.0), z3, 1.0);
    p.add_ge("x6", LinExpr::constant(e.z30.log2() + k).plus(&LinExpr::var(q6, 1.0), -k).plus(&v(6), -1.0));
    p.add_ge("x4", v(4).plus(&v(5), -1.0).plus(&v(6), 1.0));
    // d = x2 − x3 − x4 ≥ x8², d ≥ I_S
    let d = v(2).plus(&v(3), -1.0).plus(&v(4), -1.0);
    p.add_ge("security_rate", d.clone().add_const(-(prob.i_s + settings.backoff)));
    p.add_soc(
        "sqrt_rate",
        d.clone().add_const(1.0).scaled(0.5),
        vec![d.add_const(-1.0).scaled(0.5), v(8)],
    );
    let b = taylor_bilinear_bound(e.x7_0, e.x8_0)?;
    let s = 1.0 / b.c1;
    p.add_ge("see_epigraph", v(8).scaled(b.c8 * s).plus(&v(1), -b.c1 * s).plus(&v(7), -b.c7 * s));
    p.objective = v(1);
    Ok((p, blocks, xs))
}

/// Runs the BS2 inner loop from `x0` with BS1 covariances and the echo
/// filter held fixed.
pub fn solve_bs2(x0: &LiftedBeams, ch: &ChannelSet, cfg: &SystemConfig, settings: &StageSettings) -> Result<Bs2State, Bs2Error> {
    let prob = Problem::new(cfg, ch, &x0.a);
    let e0 = expansion(&prob, x0)?;
    let mut last: Option<([f64; 8], Expansion)> = None;
    let out = mm_loop(&prob, x0, settings, |cur| {
        let e = expansion(&prob, cur).map_err(|e| e.to_string())?;
        let (prog, blocks, xs) = build_program(&prob, cur, settings).map_err(|e| e.to_string())?;
        let sol = conic::solve(&prog, &settings.solver).map_err(|e| e.to_string())?;
        if sol.status == Status::InfeasibleSuspected {
            return Err(format!("BS2 program infeasible ({})", sol.detail.unwrap_or_default()));
        }
        let mut next = cur.clone();
        next.o_c = sol.hermitian(blocks[0]).clone();
        for k in 0..prob.n {
            next.o_p[k] = sol.hermitian(blocks[k + 1]).clone();
        }
        let vals: [f64; 8] = std::array::from_fn(|i| sol.scalar(xs[i]));
        last = Some((vals, e));
        let d = vals[1] - vals[2] - vals[3];
        Ok((next, d))
    })?;
    let (vals, e) = last.unwrap_or(([0.0; 8], e0));
    Ok(Bs2State {
        o_c: out.x.o_c,
        o_n: out.x.o_p,
        chi: std::array::from_fn(|i| vals[i]),
        x8: vals[7],
        x3_0: e.x3_0,
        x6_0: e.z30.log2(),
        x7_0: e.x7_0,
        x8_0: e.x8_0,
        see_trace: out.see_trace,
        iterations: out.iterations,
        flag: out.flag,
    })
}
