//! Alternating optimization: echo filter, then BS1 covariances, then BS2
//! covariances, repeated until the SEE settles; followed by rank-1
//! extraction and the audit of the extracted beams.

use std::time::Instant;

use conic::{BlockKind, ConicProgram, LinExpr, Status};
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bs1_bf::solve_bs1;
use crate::bs2_bf::solve_bs2;
use crate::echo_bf::{echo_filter, matched_filter};
use crate::linalg::{c, herm_eig_desc, outer, trace_re, CMat, CVec};
use crate::metrics::{
    check_feasibility, check_feasibility_lifted, evaluate, evaluate_lifted, BeamformerSet, EveView, FeasibilityReport,
    LiftedBeams, Metrics, MetricsError,
};
use crate::problem::{add_cone, o_p, vars, Problem, StageSettings, O_C, W_BO, W_TA};
use crate::sysmodel::{complex_gaussian, stream_rng, ChannelSet, Stream, SystemConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    /// Outer stop: SEE change between outer iterations at most `delta`.
    pub delta: f64,
    pub max_outer: usize,
    pub bs1: StageSettings,
    pub bs2: StageSettings,
    pub init_attempts: usize,
    /// Power scaling of the initial guess between restarts.
    pub restart_scale: f64,
    pub randomization_candidates: usize,
    /// Eigenvalue ratio `λ2/λ1` above which randomization replaces the principal eigenvector.
    pub rank_ratio: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            delta: 1e-4,
            max_outer: 100,
            bs1: StageSettings { max_iter: 50, ..StageSettings::default() },
            bs2: StageSettings { max_iter: 40, ..StageSettings::default() },
            init_attempts: 20,
            restart_scale: 0.8,
            randomization_candidates: 50,
            rank_ratio: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub outer: usize,
    /// Optimizer-view SEE of the covariances after this outer iteration.
    pub see: f64,
    pub bs1_iterations: usize,
    pub bs2_iterations: usize,
    pub echo_ms: f64,
    pub bs1_ms: f64,
    pub bs2_ms: f64,
    pub flag: String,
}

/// Loss caused by rank-1 extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdrSlack {
    /// `(SEE_lifted − SEE_extracted)/SEE_lifted`, optimizer view, floored at 0.
    pub see_loss: f64,
    /// Positive residual of each optimizer-view constraint after extraction.
    pub constraints: Vec<(String, f64)>,
    /// Largest of `see_loss` and the constraint shortfalls.
    pub relative: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub status: SolveStatus,
    /// Extracted beams; serialized with interleaved `[re, im, ...]` arrays.
    #[serde(serialize_with = "serialize_beams")]
    pub bf: BeamformerSet,
    #[serde(skip)]
    pub lifted: LiftedBeams,
    /// Audit-view metrics of the extracted beams.
    pub metrics: Option<Metrics>,
    /// Optimizer-view metrics of the extracted beams.
    pub optimizer_metrics: Option<Metrics>,
    /// Optimizer-view metrics of the covariances before extraction.
    pub lifted_metrics: Option<Metrics>,
    pub lifted_feasibility: Option<FeasibilityReport>,
    pub extracted_feasibility: Option<FeasibilityReport>,
    pub sdr_slack: Option<SdrSlack>,
    /// Whether Gaussian randomization replaced the principal eigenvectors.
    pub randomized: bool,
    pub trace: Vec<TraceRow>,
    pub iterations: usize,
    pub init_attempts: usize,
    pub complexity: f64,
    pub message: Option<String>,
}

fn serialize_beams<S: serde::Serializer>(bf: &BeamformerSet, s: S) -> Result<S::Ok, S::Error> {
    bf.to_json().serialize(s)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExtractError {
    #[error("matrix is indefinite (min eigenvalue {0:e})")]
    Indefinite(f64),
}

/// Flop-order estimate of one outer iteration of the interior-point solves.
pub fn complexity_estimate(cfg: &SystemConfig) -> f64 {
    let (m1, m2, n) = (cfg.m1() as f64, cfg.m2() as f64, cfg.n_users as f64);
    let d = m1 * m1 + (n + 1.0) * m2 * m2 + (n + 7.0);
    let cones = (2.0 * m1 + (n + 1.0) * m2 + n + 8.0).sqrt();
    let work = m1 * m1 * (m1 + d) + (n + 1.0) * m2 * m2 * (m2 + d) + (n + 8.0) * (1.0 + d) + 3.0 * (n + 1.0) + d * d;
    cones * d * work
}

fn check_psd(w: &CMat) -> Result<(Vec<f64>, CMat), ExtractError> {
    let (vals, vecs) = herm_eig_desc(w);
    let top = vals.first().copied().unwrap_or(0.0).max(0.0);
    let min = vals.last().copied().unwrap_or(0.0);
    if min < -1e-8 * top.max(1.0) {
        return Err(ExtractError::Indefinite(min));
    }
    Ok((vals, vecs))
}

fn principal(vals: &[f64], vecs: &CMat) -> CVec {
    vecs.column(0) * c(vals[0].max(0.0).sqrt(), 0.0)
}

/// Gaussian candidate `U Λ^{1/2} r`, `r ~ CN(0, I)`, rescaled to `‖w‖² = Tr(W)`.
fn gaussian_candidate(vals: &[f64], vecs: &CMat, rng: &mut ChaCha20Rng) -> CVec {
    let m = vals.len();
    let r = CVec::from_fn(m, |i, _| complex_gaussian(rng, 1.0) * c(vals[i].max(0.0).sqrt(), 0.0));
    let w = vecs * r;
    let tr: f64 = vals.iter().map(|v| v.max(0.0)).sum();
    let nrm = w.norm();
    if nrm == 0.0 {
        return w;
    }
    w * c(tr.sqrt() / nrm, 0.0)
}

fn rank_ratio(vals: &[f64]) -> f64 {
    match vals {
        [a, b, ..] if *a > 0.0 => b.max(0.0) / a,
        _ => 0.0,
    }
}

/// Rank-1 vector of a PSD matrix: the principal eigenpair `√λ1·u1` when
/// `λ2/λ1 ≤ ratio`; otherwise the Gaussian candidate (out of `candidates`)
/// capturing the largest share `wᴴWw/‖w‖²` of `W`, at power `Tr(W)`.
/// Returns the vector and whether randomization was used.
pub fn rank1_extract(w: &CMat, ratio: f64, candidates: usize, rng: &mut ChaCha20Rng) -> Result<(CVec, bool), ExtractError> {
    let (vals, vecs) = check_psd(w)?;
    if vals.is_empty() || rank_ratio(&vals) <= ratio {
        return Ok((if vals.is_empty() { CVec::zeros(0) } else { principal(&vals, &vecs) }, false));
    }
    let score = |v: &CVec| {
        let n = v.norm_squared();
        if n == 0.0 { 0.0 } else { crate::linalg::quad(v, w) / n }
    };
    let best = (0..candidates)
        .map(|_| gaussian_candidate(&vals, &vecs, rng))
        .max_by(|a, b| score(a).total_cmp(&score(b)))
        .unwrap_or_else(|| principal(&vals, &vecs));
    Ok((best, true))
}

/// Power-minimizing SDP whose constraints imply every constraint of the
/// design problem; `c_ratio` balances the AM-GM bound of the security product.
fn init_program(prob: &Problem, c_ratio: f64) -> (ConicProgram, Vec<usize>) {
    let mut p = ConicProgram::new();
    let mut blocks = vec![
        p.add_block("W_bo", BlockKind::Psd(prob.m1)),
        p.add_block("W_ta", BlockKind::Psd(prob.m1)),
        p.add_block("O_c", BlockKind::Psd(prob.m2)),
    ];
    for k in 0..prob.n {
        blocks.push(p.add_block(&format!("O_{}", k + 1), BlockKind::Psd(prob.m2)));
    }
    let mut free = vec![None; prob.nvars()];
    free[W_BO] = Some(blocks[0]);
    free[W_TA] = Some(blocks[1]);
    free[O_C] = Some(blocks[2]);
    for k in 0..prob.n {
        free[o_p(k)] = Some(blocks[3 + k]);
    }
    let zero: Vec<CMat> = (0..prob.nvars()).map(|v| CMat::zeros(if v < 2 { prob.m1 } else { prob.m2 }, 1)).collect();
    let x: Vec<&CMat> = zero.iter().collect();
    let margin = 1e-6;
    for (name, a) in prob.linear_constraints() {
        p.add_ge(&name, a.to_expr(&free, &x).add_const(-margin));
    }
    let scale = prob.power_scale();
    add_cone(&mut p, "robust_security", &prob.robust_security_cone(), &free, &x, &scale);
    add_cone(&mut p, "amgm_security", &prob.amgm_security_cone(c_ratio), &free, &x, &scale);
    let total = prob.p1().plus(&prob.p2(), 1.0).to_expr(&free, &x);
    p.objective = LinExpr::constant(0.0).plus(&total, -1.0 / (prob.p1_max + prob.p2_max));
    (p, blocks)
}

/// Feasible starting covariances, with the number of attempts used.
fn initialize(prob: &Problem, a: &CVec, ch: &ChannelSet, cfg: &SystemConfig, settings: &OptimizerSettings) -> Result<(LiftedBeams, usize), String> {
    let mut rng = stream_rng(cfg.rng_seed, Stream::Restart);
    let h_bo = &ch.h_bo / c(ch.h_bo.norm().max(f64::MIN_POSITIVE), 0.0);
    let m1 = prob.m1;
    let mut last_err = String::from("no attempt made");
    let mut scale = 1.0;
    for attempt in 0..settings.init_attempts.max(1) {
        let guess = if attempt == 0 {
            h_bo.clone()
        } else {
            let phases = CVec::from_fn(m1, |_, _| {
                let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                c(t.cos(), t.sin()) / c((m1 as f64).sqrt(), 0.0)
            });
            let v = &h_bo + phases * c(scale, 0.0);
            &v / c(v.norm().max(f64::MIN_POSITIVE), 0.0)
        };
        let w = outer(&guess, &guess) * c(cfg.p1_max * scale, 0.0);
        let b0 = crate::linalg::re_trace(&prob.h_bo, &w);
        let x0 = crate::linalg::re_trace(&prob.h_e_max, &w);
        let c_ratio = if b0 > 0.0 && x0 > 0.0 { (b0 / x0).sqrt() } else { 1.0 };
        scale *= settings.restart_scale;
        let (prog, blocks) = init_program(prob, c_ratio);
        let sol = match conic::solve(&prog, &settings.bs1.solver) {
            Ok(s) if s.status != Status::InfeasibleSuspected => s,
            Ok(s) => {
                last_err = format!("initial program infeasible ({})", s.detail.unwrap_or_default());
                continue;
            }
            Err(e) => {
                last_err = e.to_string();
                continue;
            }
        };
        let x = LiftedBeams {
            a: a.clone(),
            w_bo: sol.hermitian(blocks[0]).clone(),
            w_ta: sol.hermitian(blocks[1]).clone(),
            o_c: sol.hermitian(blocks[2]).clone(),
            o_p: (0..prob.n).map(|k| sol.hermitian(blocks[3 + k]).clone()).collect(),
        };
        let viol = prob.max_violation(&vars(&x));
        if viol <= settings.bs1.accept_tol {
            return Ok((x, attempt + 1));
        }
        last_err = format!("initial point violates constraints by {viol:e}");
    }
    Err(last_err)
}

fn eigs(x: &LiftedBeams) -> Result<Vec<(Vec<f64>, CMat)>, ExtractError> {
    vars(x).into_iter().map(check_psd).collect()
}

fn assemble(a: &CVec, v: &[CVec]) -> BeamformerSet {
    BeamformerSet { a: a.clone(), w_bo: v[0].clone(), w_ta: v[1].clone(), o_c: v[2].clone(), o_p: v[3..].to_vec() }
}

/// Extracts beams jointly: the principal eigenvectors when every covariance
/// is numerically rank one; otherwise the best of the principal set, its
/// trace-rescaled version and `candidates` Gaussian draws, ranked by
/// constraint violation first and optimizer-view SEE second.
fn extract(prob: &Problem, x: &LiftedBeams, settings: &OptimizerSettings, seed: u64) -> Result<(BeamformerSet, bool), ExtractError> {
    let e = eigs(x)?;
    let princ: Vec<CVec> = e.iter().map(|(v, u)| principal(v, u)).collect();
    if e.iter().all(|(v, _)| rank_ratio(v) <= settings.rank_ratio) {
        return Ok((assemble(&x.a, &princ), false));
    }
    let rescaled: Vec<CVec> = e
        .iter()
        .zip(&princ)
        .map(|((v, _), w)| {
            let tr: f64 = v.iter().map(|l| l.max(0.0)).sum();
            let n = w.norm();
            if n == 0.0 { w.clone() } else { w * c(tr.sqrt() / n, 0.0) }
        })
        .collect();
    let mut rng = stream_rng(seed, Stream::Randomization);
    let mut cands = vec![princ, rescaled];
    for _ in 0..settings.randomization_candidates {
        cands.push(e.iter().map(|(v, u)| gaussian_candidate(v, u, &mut rng)).collect());
    }
    let score = |cand: &Vec<CVec>| {
        let lifted: Vec<CMat> = cand.iter().map(|w| outer(w, w)).collect();
        let refs: Vec<&CMat> = lifted.iter().collect();
        let viol = prob.max_violation(&refs).max(0.0);
        (viol, prob.see(&refs))
    };
    let best = cands
        .into_iter()
        .map(|cand| {
            let s = score(&cand);
            (cand, s)
        })
        .min_by(|(_, (va, sa)), (_, (vb, sb))| {
            let fa = *va <= settings.bs1.accept_tol;
            let fb = *vb <= settings.bs1.accept_tol;
            match (fa, fb) {
                (true, true) => sb.total_cmp(sa),
                (true, false) => std::cmp::Ordering::Less,
                (false, true) => std::cmp::Ordering::Greater,
                (false, false) => va.total_cmp(vb),
            }
        })
        .map(|(cand, _)| cand)
        .expect("at least two candidates");
    Ok((assemble(&x.a, &best), true))
}

fn sdr_slack(lifted_see: f64, extracted_see: f64, report: &FeasibilityReport) -> SdrSlack {
    let see_loss = if lifted_see > 0.0 { ((lifted_see - extracted_see) / lifted_see).max(0.0) } else { 0.0 };
    let constraints: Vec<(String, f64)> = report.checks.iter().map(|c| (c.name.clone(), c.residual.max(0.0))).collect();
    let relative = constraints.iter().map(|(_, r)| *r).fold(see_loss, f64::max);
    SdrSlack { see_loss, constraints, relative }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs the alternating optimization for one channel set.
pub fn optimize(cfg: &SystemConfig, ch: &ChannelSet, settings: &OptimizerSettings) -> Result<Solution, MetricsError> {
    let (m1, m2, n) = (cfg.m1(), cfg.m2(), cfg.n_users);
    let a0 = matched_filter(&ch.h_ta);
    let mut sol = Solution {
        status: SolveStatus::Infeasible,
        bf: BeamformerSet::zeros(m1, m2, n),
        lifted: LiftedBeams::from_vectors(&BeamformerSet::zeros(m1, m2, n)),
        metrics: None,
        optimizer_metrics: None,
        lifted_metrics: None,
        lifted_feasibility: None,
        extracted_feasibility: None,
        sdr_slack: None,
        randomized: false,
        trace: Vec::new(),
        iterations: 0,
        init_attempts: 0,
        complexity: complexity_estimate(cfg),
        message: None,
    };
    let prob0 = Problem::new(cfg, ch, &a0);
    let (mut x, attempts) = match initialize(&prob0, &a0, ch, cfg, settings) {
        Ok(r) => r,
        Err(e) => {
            sol.init_attempts = settings.init_attempts;
            sol.message = Some(e);
            return Ok(sol);
        }
    };
    sol.init_attempts = attempts;
    let mut see = prob0.see(&vars(&x));
    sol.trace.push(TraceRow {
        outer: 0,
        see,
        bs1_iterations: 0,
        bs2_iterations: 0,
        echo_ms: 0.0,
        bs1_ms: 0.0,
        bs2_ms: 0.0,
        flag: "initial point".into(),
    });
    sol.status = SolveStatus::MaxIterations;
    for outer in 0..settings.max_outer {
        let mut flags = Vec::new();
        let t = Instant::now();
        let w_sum = &x.w_bo + &x.w_ta;
        match echo_filter(&ch.h_ta, &w_sum, cfg.kappa2, cfg.sigma2) {
            Ok((_, a)) => {
                // The SCNR row depends on the filter, so keep the old one if the new breaks feasibility.
                let mut trial = x.clone();
                trial.a = a;
                let p = Problem::new(cfg, ch, &trial.a);
                if p.max_violation(&vars(&trial)) <= settings.bs1.accept_tol {
                    x = trial;
                } else {
                    flags.push("echo filter kept".to_string());
                }
            }
            Err(e) => flags.push(e.to_string()),
        }
        let echo_ms = ms(t);
        let t = Instant::now();
        let (mut it1, mut it2) = (0, 0);
        match solve_bs1(&x, ch, cfg, &settings.bs1) {
            Ok(s) => {
                x.w_bo = s.w_bo;
                x.w_ta = s.w_ta;
                it1 = s.iterations;
                flags.extend(s.flag.map(|f| format!("bs1: {f}")));
            }
            Err(e) => flags.push(format!("bs1: {e}")),
        }
        let bs1_ms = ms(t);
        let t = Instant::now();
        match solve_bs2(&x, ch, cfg, &settings.bs2) {
            Ok(s) => {
                x.o_c = s.o_c;
                x.o_p = s.o_n;
                it2 = s.iterations;
                flags.extend(s.flag.map(|f| format!("bs2: {f}")));
            }
            Err(e) => flags.push(format!("bs2: {e}")),
        }
        let bs2_ms = ms(t);
        let next = Problem::new(cfg, ch, &x.a).see(&vars(&x));
        sol.trace.push(TraceRow {
            outer: outer + 1,
            see: next,
            bs1_iterations: it1,
            bs2_iterations: it2,
            echo_ms,
            bs1_ms,
            bs2_ms,
            flag: flags.join("; "),
        });
        sol.iterations = outer + 1;
        let change = (next - see).abs();
        see = next;
        if change <= settings.delta {
            sol.status = SolveStatus::Converged;
            break;
        }
    }
    let prob = Problem::new(cfg, ch, &x.a);
    let (bf, randomized) = match extract(&prob, &x, settings, cfg.rng_seed) {
        Ok(r) => r,
        Err(e) => {
            sol.message = Some(e.to_string());
            sol.lifted = x;
            return Ok(sol);
        }
    };
    let lifted_metrics = evaluate_lifted(ch, &x, cfg, EveView::Optimizer)?;
    let optimizer_metrics = evaluate_lifted(ch, &LiftedBeams::from_vectors(&bf), cfg, EveView::Optimizer)?;
    let report = check_feasibility(ch, &bf, cfg, true)?;
    sol.sdr_slack = Some(sdr_slack(
        prob.see(&vars(&x)),
        prob.see(&vars(&LiftedBeams::from_vectors(&bf))),
        &report,
    ));
    sol.lifted_feasibility = Some(check_feasibility_lifted(ch, &x, cfg, EveView::Optimizer)?);
    sol.extracted_feasibility = Some(report);
    sol.metrics = Some(evaluate(ch, &bf, cfg)?);
    sol.optimizer_metrics = Some(optimizer_metrics);
    sol.lifted_metrics = Some(lifted_metrics);
    sol.randomized = randomized;
    sol.bf = bf;
    sol.lifted = x;
    Ok(sol)
}

/// Trace power of each covariance, for diagnostics.
pub fn covariance_powers(x: &LiftedBeams) -> Vec<f64> {
    vars(x).into_iter().map(trace_re).collect()
}
