//! BS1 stage: the ISAC transmit covariances `W_bo`, `W_ta` for fixed BS2
//! covariances and echo filter.
//!
//! Each inner step maximizes the quadratic transform `2·r_a·√R − r_a²·P`
//! of the security energy efficiency, where `R` is a concave minorant of
//! the worst-case security rate
//! `log₂ z1 − log₂ a_bo − log₂ z2 + log₂ z3` built from
//! * `log₂ z ≥ log₂ z0 + (1 − q)/ln 2` with `q·z ≥ z0` (for `z1`, `z3`);
//! * `log₂ z ≤ log₂ z0 + (z − z0)/(z0·ln 2)` (for `z2`).
//!
//! Both bounds touch at the current iterate, so every step is an ascent step.

use std::f64::consts::LN_2;

use conic::{BlockKind, ConicProgram, LinExpr, Status};

use crate::linalg::{c, identity, outer, CMat, CVec};
use crate::metrics::LiftedBeams;
use crate::problem::{add_cone, add_hyperbolic, mm_loop, vars, Affine, Problem, StageError, StageSettings, W_BO, W_TA};
use crate::sysmodel::{ChannelSet, SystemConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Bs1Error {
    #[error("logarithm arguments must be positive (z = {0}, z0 = {1})")]
    NonPositive(f64, f64),
    #[error("total power must be positive")]
    ZeroPower,
    #[error(transparent)]
    Stage(#[from] StageError),
}

/// Tangent upper bound of `log₂ z` at `z0`: `(z − z0)/(z0·ln 2) + log₂ z0`.
pub fn mm_log_upper_bound(z: f64, z0: f64) -> Result<f64, Bs1Error> {
    if !(z > 0.0 && z0 > 0.0) {
        return Err(Bs1Error::NonPositive(z, z0));
    }
    Ok((z - z0) / (z0 * LN_2) + z0.log2())
}

/// `(h_es h_esᴴ + e·I, h_es h_esᴴ − e·I)`.
pub fn robust_eve_matrices(h_es: &CVec, e_h_ub: f64) -> (CMat, CMat) {
    let h = outer(h_es, h_es);
    let e = identity(h_es.len()) * c(e_h_ub, 0.0);
    (&h + &e, &h - &e)
}

/// Affine tangent surrogates of the two Eve-side rate terms at an iterate,
/// in bits: `r2 ≥ log₂ z2` and `r3 ≥ log₂ z3`, where
/// `z2 = X_max + Y_min + I_e,min + 1` and `z3 = Y_min + I_e,min + 1` are
/// the worst-case wiretap signal-plus-interference and interference terms.
#[derive(Debug, Clone)]
pub struct EveRateSurrogates {
    pub r2: Affine,
    pub r3: Affine,
}

fn log_tangent(z: &Affine, z0: f64) -> Affine {
    z.scaled(1.0 / (z0 * LN_2)).add_const(z0.log2() - 1.0 / LN_2)
}

pub fn build_r2min_r3max(prob: &Problem, iterate: &LiftedBeams) -> Result<EveRateSurrogates, Bs1Error> {
    let x = vars(iterate);
    let (z2, z3) = (prob.z2(), prob.z3());
    let (z20, z30) = (z2.eval(&x), z3.eval(&x));
    if z20 <= 0.0 || z30 <= 0.0 {
        return Err(Bs1Error::NonPositive(z20.min(z30), z20.min(z30)));
    }
    Ok(EveRateSurrogates { r2: log_tangent(&z2, z20), r3: log_tangent(&z3, z30) })
}

/// Closed-form quadratic-transform auxiliaries: `r_a = √R/P` maximizes
/// `2r√R − r²P`, and `s_a = √(1+γ_bo)/(1+γ_e)` maximizes
/// `2s√(1+γ_bo) − s²(1+γ_e)`.
pub fn quadratic_transform_updates(r: f64, p_sum: f64, gamma_bo: f64, gamma_e: f64) -> Result<(f64, f64), Bs1Error> {
    if p_sum <= 0.0 {
        return Err(Bs1Error::ZeroPower);
    }
    Ok((r.max(0.0).sqrt() / p_sum, (1.0 + gamma_bo).sqrt() / (1.0 + gamma_e)))
}

/// First-order surrogate of `w wᴴ` around `w_prev`:
/// `w_prev wᴴ + w w_prevᴴ − w_prev w_prevᴴ ⪯ w wᴴ`.
pub fn sca_lift(w_prev: &CVec, w: &CVec) -> CMat {
    outer(w_prev, w) + outer(w, w_prev) - outer(w_prev, w_prev)
}

#[derive(Debug, Clone)]
pub struct Bs1State {
    pub w_bo: CMat,
    pub w_ta: CMat,
    /// Worst-case security rate at the final iterate.
    pub r: f64,
    pub r_a: f64,
    pub s_a: f64,
    pub see_trace: Vec<f64>,
    pub surrogate_trace: Vec<f64>,
    /// `1 + Tr(G_bo O_sum)/σ²` and `1 + I_e,min/σ²`: BS2 interference plus noise at Bob and Eve.
    pub alpha_bo: f64,
    pub alpha_e: f64,
    pub iterations: usize,
    pub flag: Option<String>,
}

/// One BS1 program around `cur`: returns the program, the covariance block
/// indices and the rate-epigraph block.
pub fn build_program(prob: &Problem, cur: &LiftedBeams, settings: &StageSettings) -> Result<(ConicProgram, [usize; 3]), Bs1Error> {
    let x = vars(cur);
    let (z10, z20, z30, a0) = (prob.z1().eval(&x), prob.z2().eval(&x), prob.z3().eval(&x), prob.a_bo().eval(&x));
    if z10 <= 0.0 || z20 <= 0.0 || z30 <= 0.0 {
        return Err(Bs1Error::NonPositive(z10.min(z20).min(z30), 0.0));
    }
    let r0 = prob.robust_secrecy(&x);
    let (r_a, _) = quadratic_transform_updates(r0, prob.total_power(&x), 0.0, 0.0)?;

    let mut p = ConicProgram::new();
    let bw = p.add_block("W_bo", BlockKind::Psd(prob.m1));
    let bt = p.add_block("W_ta", BlockKind::Psd(prob.m1));
    let rho = p.add_block("rate", BlockKind::Free);
    let t = p.add_block("sqrt_rate", BlockKind::Free);
    let q1 = p.add_block("q1", BlockKind::Free);
    let q3 = p.add_block("q3", BlockKind::Free);
    let mut free = vec![None; prob.nvars()];
    free[W_BO] = Some(bw);
    free[W_TA] = Some(bt);

    for (name, a) in prob.linear_constraints() {
        if a.depends_on(&free) {
            p.add_ge(&name, a.to_expr(&free, &x).add_const(-settings.backoff));
        }
    }
    add_cone(&mut p, "robust_security", &prob.robust_security_cone(), &free, &x, &prob.power_scale());

    let z1 = prob.z1().to_expr(&free, &x).scaled(1.0 / z10);
    let z2 = prob.z2().to_expr(&free, &x).scaled(1.0 / z20);
    let z3 = prob.z3().to_expr(&free, &x).scaled(1.0 / z30);
    add_hyperbolic(&mut p, "log_z1", LinExpr::var(q1, 1.0), z1, 1.0);
    add_hyperbolic(&mut p, "log_z3", LinExpr::var(q3, 1.0), z3, 1.0);
    let k = 1.0 / LN_2;
    let base = z10.log2() - a0.log2() - z20.log2() + z30.log2() + 3.0 * k;
    let epigraph = LinExpr::constant(base)
        .plus(&LinExpr::var(q1, 1.0), -k)
        .plus(&LinExpr::var(q3, 1.0), -k)
        .plus(&z2, -k)
        .plus(&LinExpr::var(rho, 1.0), -1.0);
    p.add_ge("rate_epigraph", epigraph);
    p.add_ge("security_rate", LinExpr::var(rho, 1.0).add_const(-(prob.i_s + settings.backoff)));
    p.add_soc(
        "sqrt_rate",
        LinExpr::var(rho, 1.0).add_const(1.0),
        vec![LinExpr::var(t, 2.0), LinExpr::var(rho, 1.0).add_const(-1.0)],
    );
    let power = prob.p1().to_expr(&free, &x);
    p.objective = LinExpr::var(t, 2.0 * r_a).plus(&power, -r_a * r_a);
    Ok((p, [bw, bt, rho]))
}

fn step(prob: &Problem, cur: &LiftedBeams, settings: &StageSettings) -> Result<(LiftedBeams, f64), String> {
    let (prog, [bw, bt, rho]) = build_program(prob, cur, settings).map_err(|e| e.to_string())?;
    let sol = conic::solve(&prog, &settings.solver).map_err(|e| e.to_string())?;
    if sol.status == Status::InfeasibleSuspected {
        return Err(format!("BS1 program infeasible ({})", sol.detail.unwrap_or_default()));
    }
    let mut next = cur.clone();
    next.w_bo = sol.hermitian(bw).clone();
    next.w_ta = sol.hermitian(bt).clone();
    Ok((next, sol.scalar(rho)))
}

/// Runs the BS1 inner loop from `x0` with BS2 covariances and the echo
/// filter held fixed.
pub fn solve_bs1(x0: &LiftedBeams, ch: &ChannelSet, cfg: &SystemConfig, settings: &StageSettings) -> Result<Bs1State, Bs1Error> {
    let prob = Problem::new(cfg, ch, &x0.a);
    let out = mm_loop(&prob, x0, settings, |cur| step(&prob, cur, settings))?;
    let x = vars(&out.x);
    let r = prob.robust_secrecy(&x);
    let alpha_bo = prob.a_bo().eval(&x);
    let alpha_e = prob.eve_bs2_min().eval(&x) + 1.0;
    let gamma_bo = prob.bob_signal().eval(&x) / alpha_bo;
    let gamma_e = prob.x_max().eval(&x) / prob.z3().eval(&x);
    let (r_a, s_a) = quadratic_transform_updates(r, prob.total_power(&x), gamma_bo, gamma_e)?;
    Ok(Bs1State {
        w_bo: out.x.w_bo,
        w_ta: out.x.w_ta,
        r,
        r_a,
        s_a,
        see_trace: out.see_trace,
        surrogate_trace: out.surrogate_trace,
        alpha_bo,
        alpha_e,
        iterations: out.iterations,
        flag: out.flag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_bound_touches_and_dominates() {
        assert!((mm_log_upper_bound(4.0, 4.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(mm_log_upper_bound(2.0, 1.0).unwrap() >= 1.0);
        assert!(mm_log_upper_bound(0.0, 1.0).is_err());
        assert!(mm_log_upper_bound(1.0, -1.0).is_err());
    }

    #[test]
    fn quadratic_transform_is_tight() {
        let (r_a, s_a) = quadratic_transform_updates(4.0, 2.0, 0.0, 0.0).unwrap();
        assert!((r_a - 1.0).abs() < 1e-15);
        assert!((2.0 * r_a * 2.0 - r_a * r_a * 2.0 - 2.0).abs() < 1e-15);
        assert!((s_a - 1.0).abs() < 1e-15);
        assert!(quadratic_transform_updates(1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn sca_lift_touches_and_vanishes_at_zero() {
        let w = CVec::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.3)]);
        assert!((sca_lift(&w, &w) - outer(&w, &w)).norm() < 1e-15);
        assert_eq!(sca_lift(&CVec::zeros(2), &w), CMat::zeros(2, 2));
    }

    #[test]
    fn robust_matrices_differ_by_twice_the_bound() {
        let h = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let (hi, lo) = robust_eve_matrices(&h, 0.25);
        assert!((hi - lo - identity(2) * c(0.5, 0.0)).norm() < 1e-15);
        let (hi0, lo0) = robust_eve_matrices(&CVec::zeros(2), 0.25);
        assert!((hi0 + lo0).norm() < 1e-15);
    }
}
