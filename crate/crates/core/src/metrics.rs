//! SINRs, rates, echo SCNR, powers, security rate and SEE for a channel set
//! and a beamformer set, plus the constraint checklist of the design problem.
//!
//! Everything is computed from received powers collected in [`Gains`], so
//! the same formulas serve rank-1 vectors and lifted covariance matrices.
//! Eve-side powers are intervals: the audit view uses Eve's true channel
//! (degenerate intervals) and the optimizer view uses the estimate widened
//! by the CSI matrix bound, `Tr((h_es h_esᴴ ± e_UB·I) W)`.

use serde::{Deserialize, Serialize};

use crate::linalg::{deinterleave, gain, interleave, outer, quad, trace_re, CMat, CVec};
use crate::sysmodel::{ChannelSet, SystemConfig};

/// Residual below which a constraint counts as satisfied.
pub const FEAS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    pub a: CVec,
    pub w_bo: CVec,
    pub w_ta: CVec,
    pub o_c: CVec,
    pub o_p: Vec<CVec>,
}

/// Interleaved `[re, im, ...]` layout of [`BeamformerSet`] for JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformerJson {
    pub a: Vec<f64>,
    pub w_bo: Vec<f64>,
    pub w_ta: Vec<f64>,
    pub o_c: Vec<f64>,
    pub o_p: Vec<Vec<f64>>,
}

impl BeamformerSet {
    pub fn zeros(m1: usize, m2: usize, n: usize) -> Self {
        let mut a = CVec::zeros(m1);
        a[0] = crate::linalg::c(1.0, 0.0);
        Self { a, w_bo: CVec::zeros(m1), w_ta: CVec::zeros(m1), o_c: CVec::zeros(m2), o_p: vec![CVec::zeros(m2); n] }
    }

    pub fn p1(&self) -> f64 {
        self.w_bo.norm_squared() + self.w_ta.norm_squared()
    }

    pub fn p2(&self) -> f64 {
        self.o_c.norm_squared() + self.o_p.iter().map(|o| o.norm_squared()).sum::<f64>()
    }

    pub fn to_json(&self) -> BeamformerJson {
        BeamformerJson {
            a: interleave(&self.a),
            w_bo: interleave(&self.w_bo),
            w_ta: interleave(&self.w_ta),
            o_c: interleave(&self.o_c),
            o_p: self.o_p.iter().map(interleave).collect(),
        }
    }

    pub fn from_json(j: &BeamformerJson) -> Self {
        Self {
            a: deinterleave(&j.a),
            w_bo: deinterleave(&j.w_bo),
            w_ta: deinterleave(&j.w_ta),
            o_c: deinterleave(&j.o_c),
            o_p: j.o_p.iter().map(|v| deinterleave(v)).collect(),
        }
    }
}

/// Transmit covariances `W = w wᴴ` (or their relaxations) and the echo filter.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedBeams {
    pub a: CVec,
    pub w_bo: CMat,
    pub w_ta: CMat,
    pub o_c: CMat,
    pub o_p: Vec<CMat>,
}

impl LiftedBeams {
    pub fn from_vectors(bf: &BeamformerSet) -> Self {
        Self {
            a: bf.a.clone(),
            w_bo: outer(&bf.w_bo, &bf.w_bo),
            w_ta: outer(&bf.w_ta, &bf.w_ta),
            o_c: outer(&bf.o_c, &bf.o_c),
            o_p: bf.o_p.iter().map(|o| outer(o, o)).collect(),
        }
    }

    pub fn p1(&self) -> f64 {
        trace_re(&self.w_bo) + trace_re(&self.w_ta)
    }

    pub fn p2(&self) -> f64 {
        trace_re(&self.o_c) + self.o_p.iter().map(trace_re).sum::<f64>()
    }

    pub fn o_sum(&self) -> CMat {
        self.o_p.iter().fold(self.o_c.clone(), |acc, o| acc + o)
    }

    /// BS2 covariances in the order `[O_c, O_1, .., O_N]`.
    pub fn bs2(&self) -> Vec<&CMat> {
        std::iter::once(&self.o_c).chain(&self.o_p).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EveView {
    /// Eve's true channel.
    Audit,
    /// Eve's estimated channel with the robust `±e_UB·I` widening.
    Optimizer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }
}

/// Received powers (W) at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Gains {
    pub bob_bo: f64,
    pub bob_ta: f64,
    /// `|g_boᴴo_c|² + Σ|g_boᴴo_n|²`.
    pub bob_bs2: f64,
    pub eve_bo: Interval,
    pub eve_ta: Interval,
    pub eve_bs2: Interval,
    /// `|h_nᴴw_bo|² + |h_nᴴw_ta|²` per user.
    pub user_bs1: Vec<f64>,
    /// `|g_nᴴo_c|²` per user.
    pub user_common: Vec<f64>,
    /// `[n][j] = |g_nᴴo_j|²`.
    pub user_private: Vec<Vec<f64>>,
    /// Echo SCNR with the set's filter.
    pub scnr: f64,
    pub p1: f64,
    pub p2: f64,
}

fn widen(nominal: f64, e_ub: f64, power: f64, view: EveView) -> Interval {
    match view {
        EveView::Audit => Interval::point(nominal),
        EveView::Optimizer => Interval { lo: nominal - e_ub * power, hi: nominal + e_ub * power },
    }
}

impl Gains {
    pub fn from_lifted(ch: &ChannelSet, x: &LiftedBeams, cfg: &SystemConfig, view: EveView) -> Result<Self, MetricsError> {
        let o_sum = x.o_sum();
        let (h_e, g_e) = match view {
            EveView::Audit => (ch.h_e(), ch.g_e()),
            EveView::Optimizer => (ch.h_es.clone(), ch.g_es.clone()),
        };
        let unc = ch.uncertainty();
        let w_sum = &x.w_bo + &x.w_ta;
        let n = ch.n_users();
        Ok(Self {
            bob_bo: quad(&ch.h_bo, &x.w_bo),
            bob_ta: quad(&ch.h_bo, &x.w_ta),
            bob_bs2: quad(&ch.g_bo, &o_sum),
            eve_bo: widen(quad(&h_e, &x.w_bo), unc.e_h_ub, trace_re(&x.w_bo), view),
            eve_ta: widen(quad(&h_e, &x.w_ta), unc.e_h_ub, trace_re(&x.w_ta), view),
            eve_bs2: widen(quad(&g_e, &o_sum), unc.e_g_ub, trace_re(&o_sum), view),
            user_bs1: (0..n).map(|k| quad(&ch.h_n[k], &w_sum)).collect(),
            user_common: (0..n).map(|k| quad(&ch.g_n[k], &x.o_c)).collect(),
            user_private: (0..n).map(|k| x.o_p.iter().map(|o| quad(&ch.g_n[k], o)).collect()).collect(),
            scnr: scnr_lifted(&ch.h_ta, &x.a, &w_sum, cfg.kappa2, cfg.sigma2)?,
            p1: x.p1(),
            p2: x.p2(),
        })
    }

    pub fn from_vectors(ch: &ChannelSet, bf: &BeamformerSet, cfg: &SystemConfig, view: EveView) -> Result<Self, MetricsError> {
        if view == EveView::Optimizer {
            return Self::from_lifted(ch, &LiftedBeams::from_vectors(bf), cfg, view);
        }
        let (h_e, g_e) = (ch.h_e(), ch.g_e());
        let bs2_power = |g: &CVec| gain(g, &bf.o_c) + bf.o_p.iter().map(|o| gain(g, o)).sum::<f64>();
        let n = ch.n_users();
        Ok(Self {
            bob_bo: gain(&ch.h_bo, &bf.w_bo),
            bob_ta: gain(&ch.h_bo, &bf.w_ta),
            bob_bs2: bs2_power(&ch.g_bo),
            eve_bo: Interval::point(gain(&h_e, &bf.w_bo)),
            eve_ta: Interval::point(gain(&h_e, &bf.w_ta)),
            eve_bs2: Interval::point(bs2_power(&g_e)),
            user_bs1: (0..n).map(|k| gain(&ch.h_n[k], &bf.w_bo) + gain(&ch.h_n[k], &bf.w_ta)).collect(),
            user_common: (0..n).map(|k| gain(&ch.g_n[k], &bf.o_c)).collect(),
            user_private: (0..n).map(|k| bf.o_p.iter().map(|o| gain(&ch.g_n[k], o)).collect()).collect(),
            scnr: echo_scnr(ch, bf, cfg.kappa2, cfg.sigma2)?,
            p1: bf.p1(),
            p2: bf.p2(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("echo receive filter is zero")]
    ZeroFilter,
    #[error("user index {0} out of range 1..={1}")]
    UserIndex(usize, usize),
}

/// `num/den` with the conventions `0/x = 0` and `num/(≤0) = ∞`.
fn ratio(num: f64, den: f64) -> f64 {
    if num <= 0.0 {
        0.0
    } else if den <= 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

fn rate(gamma: f64) -> f64 {
    (1.0 + gamma).log2()
}

/// Sensing SINR at Bob: the sensing stream decoded first, under the
/// communication stream and all BS2 streams.
pub fn sinr_bob_sensing(ch: &ChannelSet, bf: &BeamformerSet, sigma2: f64) -> f64 {
    let bs2 = gain(&ch.g_bo, &bf.o_c) + bf.o_p.iter().map(|o| gain(&ch.g_bo, o)).sum::<f64>();
    ratio(gain(&ch.h_bo, &bf.w_ta), gain(&ch.h_bo, &bf.w_bo) + bs2 + sigma2)
}

/// Communication SINR at Bob after the sensing stream is cancelled.
pub fn sinr_bob_comm(ch: &ChannelSet, bf: &BeamformerSet, sigma2: f64) -> f64 {
    let bs2 = gain(&ch.g_bo, &bf.o_c) + bf.o_p.iter().map(|o| gain(&ch.g_bo, o)).sum::<f64>();
    ratio(gain(&ch.h_bo, &bf.w_bo), bs2 + sigma2)
}

/// Sensing SINR at Eve (true channel).
pub fn sinr_eve_sensing(ch: &ChannelSet, bf: &BeamformerSet, sigma2: f64) -> f64 {
    let (h_e, g_e) = (ch.h_e(), ch.g_e());
    let bs2 = gain(&g_e, &bf.o_c) + bf.o_p.iter().map(|o| gain(&g_e, o)).sum::<f64>();
    ratio(gain(&h_e, &bf.w_ta), gain(&h_e, &bf.w_bo) + bs2 + sigma2)
}

/// Communication SINR at Eve (true channel), with the sensing stream left
/// as interference.
pub fn sinr_eve_comm(ch: &ChannelSet, bf: &BeamformerSet, sigma2: f64) -> f64 {
    let (h_e, g_e) = (ch.h_e(), ch.g_e());
    let bs2 = gain(&g_e, &bf.o_c) + bf.o_p.iter().map(|o| gain(&g_e, o)).sum::<f64>();
    ratio(gain(&h_e, &bf.w_bo), gain(&h_e, &bf.w_ta) + bs2 + sigma2)
}

/// Common- and private-stream SINRs at user `n` (1-based).
pub fn sinr_rsma(ch: &ChannelSet, bf: &BeamformerSet, sigma2: f64, n: usize) -> Result<(f64, f64), MetricsError> {
    let users = ch.n_users();
    if n == 0 || n > users {
        return Err(MetricsError::UserIndex(n, users));
    }
    let g = &ch.g_n[n - 1];
    let h = &ch.h_n[n - 1];
    let bs1 = gain(h, &bf.w_bo) + gain(h, &bf.w_ta);
    let private: Vec<f64> = bf.o_p.iter().map(|o| gain(g, o)).collect();
    let all: f64 = private.iter().sum();
    let gc = ratio(gain(g, &bf.o_c), all + bs1 + sigma2);
    let gp = ratio(private[n - 1], all - private[n - 1] + bs1 + sigma2);
    Ok((gc, gp))
}

/// Echo SCNR `κ²·|aᴴh_ta|²·h_taᴴ(w_bo w_boᴴ + w_ta w_taᴴ)h_ta / (2σ²‖a‖²)`.
pub fn echo_scnr(ch: &ChannelSet, bf: &BeamformerSet, kappa2: f64, sigma2: f64) -> Result<f64, MetricsError> {
    let a2 = bf.a.norm_squared();
    if a2 == 0.0 {
        return Err(MetricsError::ZeroFilter);
    }
    let illum = gain(&ch.h_ta, &bf.w_bo) + gain(&ch.h_ta, &bf.w_ta);
    Ok(kappa2 * gain(&bf.a, &ch.h_ta) * illum / (2.0 * sigma2 * a2))
}

fn scnr_lifted(h_ta: &CVec, a: &CVec, w_sum: &CMat, kappa2: f64, sigma2: f64) -> Result<f64, MetricsError> {
    let a2 = a.norm_squared();
    if a2 == 0.0 {
        return Err(MetricsError::ZeroFilter);
    }
    Ok(kappa2 * gain(a, h_ta) * quad(h_ta, w_sum) / (2.0 * sigma2 * a2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub gamma_bo_ta: f64,
    pub gamma_bo_bo: f64,
    pub gamma_e_ta: f64,
    pub gamma_e_bo: f64,
    /// Common-stream SINR at each user.
    pub gamma_c: Vec<f64>,
    pub gamma_n: Vec<f64>,
    pub gamma_b1: f64,
    pub r_bo: f64,
    pub r_e: f64,
    pub r_s: f64,
    /// Common rate, the minimum over users.
    pub r_c: f64,
    pub r_n: Vec<f64>,
    pub p1: f64,
    pub p2: f64,
    pub p_sum: f64,
    pub see: f64,
}

impl Metrics {
    /// Worst case over the Eve intervals in `g`.
    pub fn from_gains(g: &Gains, cfg: &SystemConfig) -> Self {
        let s2 = cfg.sigma2;
        let gamma_bo_ta = ratio(g.bob_ta, g.bob_bo + g.bob_bs2 + s2);
        let gamma_bo_bo = ratio(g.bob_bo, g.bob_bs2 + s2);
        let gamma_e_ta = ratio(g.eve_ta.hi, g.eve_bo.lo + g.eve_bs2.lo + s2);
        let gamma_e_bo = ratio(g.eve_bo.hi, g.eve_ta.lo + g.eve_bs2.lo + s2);
        let n = g.user_common.len();
        let mut gamma_c = Vec::with_capacity(n);
        let mut gamma_n = Vec::with_capacity(n);
        for k in 0..n {
            let all: f64 = g.user_private[k].iter().sum();
            let own = g.user_private[k][k];
            gamma_c.push(ratio(g.user_common[k], all + g.user_bs1[k] + s2));
            gamma_n.push(ratio(own, all - own + g.user_bs1[k] + s2));
        }
        let r_bo = rate(gamma_bo_bo);
        let r_e = rate(gamma_e_bo);
        let r_s = (r_bo - r_e).max(0.0);
        let p_sum = g.p1 + g.p2 + cfg.p0;
        Self {
            gamma_bo_ta,
            gamma_bo_bo,
            gamma_e_ta,
            gamma_e_bo,
            r_c: gamma_c.iter().map(|&x| rate(x)).fold(f64::INFINITY, f64::min),
            r_n: gamma_n.iter().map(|&x| rate(x)).collect(),
            gamma_c,
            gamma_n,
            gamma_b1: g.scnr,
            r_bo,
            r_e,
            r_s,
            p1: g.p1,
            p2: g.p2,
            p_sum,
            see: r_s / p_sum,
        }
    }

    /// Column names of [`Metrics::csv_row`] for `n` users.
    pub fn csv_header(n: usize) -> Vec<String> {
        let mut h: Vec<String> =
            ["gamma_bo_ta", "gamma_bo_bo", "gamma_e_ta", "gamma_e_bo", "gamma_b1", "R_bo", "R_e", "R_S", "R_c"]
                .iter()
                .map(|s| s.to_string())
                .collect();
        for k in 1..=n {
            h.push(format!("gamma_c_{k}"));
        }
        for k in 1..=n {
            h.push(format!("gamma_p_{k}"));
        }
        for k in 1..=n {
            h.push(format!("R_p_{k}"));
        }
        h.extend(["P1", "P2", "P_sum", "SEE"].iter().map(|s| s.to_string()));
        h
    }

    pub fn csv_row(&self) -> Vec<f64> {
        let mut r = vec![
            self.gamma_bo_ta,
            self.gamma_bo_bo,
            self.gamma_e_ta,
            self.gamma_e_bo,
            self.gamma_b1,
            self.r_bo,
            self.r_e,
            self.r_s,
            self.r_c,
        ];
        r.extend(&self.gamma_c);
        r.extend(&self.gamma_n);
        r.extend(&self.r_n);
        r.extend([self.p1, self.p2, self.p_sum, self.see]);
        r
    }
}

/// Audit-view metrics of a rank-1 beamformer set.
pub fn evaluate(ch: &ChannelSet, bf: &BeamformerSet, cfg: &SystemConfig) -> Result<Metrics, MetricsError> {
    Ok(Metrics::from_gains(&Gains::from_vectors(ch, bf, cfg, EveView::Audit)?, cfg))
}

pub fn evaluate_lifted(ch: &ChannelSet, x: &LiftedBeams, cfg: &SystemConfig, view: EveView) -> Result<Metrics, MetricsError> {
    Ok(Metrics::from_gains(&Gains::from_lifted(ch, x, cfg, view)?, cfg))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub name: String,
    /// Signed, normalized; negative means satisfied with slack.
    pub residual: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub view: EveView,
    pub checks: Vec<ConstraintCheck>,
}

impl FeasibilityReport {
    pub fn all_satisfied(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `(a − b)/(|a| + |b|)`, zero when both vanish.
fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs() + b.abs();
    if s == 0.0 {
        0.0
    } else {
        (a - b) / s
    }
}

pub fn feasibility_from_gains(g: &Gains, cfg: &SystemConfig, view: EveView) -> FeasibilityReport {
    let m = Metrics::from_gains(g, cfg);
    let s2 = cfg.sigma2;
    let th = cfg.gamma_th;
    let mut checks = Vec::new();
    let mut push = |name: String, residual: f64| {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        checks.push(ConstraintCheck { name, residual, satisfied: residual <= FEAS_TOL });
    };
    push("bs1_power".into(), (g.p1 - cfg.p1_max) / cfg.p1_max);
    push("bs2_power".into(), (g.p2 - cfg.p2_max) / cfg.p2_max);
    push("security_rate".into(), cfg.i_s - (m.r_bo - m.r_e));
    push("common_rate".into(), cfg.i_c - m.r_c);
    for (k, r) in m.r_n.iter().enumerate() {
        push(format!("private_rate_{}", k + 1), cfg.i_p - r);
    }
    push("bob_decoding_order".into(), rel_diff(g.bob_bo, g.bob_ta));
    push("eve_decoding_order".into(), rel_diff(g.eve_bo.hi, g.eve_ta.lo));
    push("bob_sensing_sinr".into(), rel_diff(th * (g.bob_bo + g.bob_bs2 + s2), g.bob_ta));
    push("eve_sensing_sinr".into(), rel_diff(g.eve_ta.hi, th * (g.eve_bo.lo + g.eve_bs2.lo + s2)));
    push("echo_scnr".into(), rel_diff(th, g.scnr));
    FeasibilityReport { view, checks }
}

/// Constraint checklist for rank-1 beams; `use_estimated_eve` selects the
/// optimizer view.
pub fn check_feasibility(
    ch: &ChannelSet,
    bf: &BeamformerSet,
    cfg: &SystemConfig,
    use_estimated_eve: bool,
) -> Result<FeasibilityReport, MetricsError> {
    let view = if use_estimated_eve { EveView::Optimizer } else { EveView::Audit };
    Ok(feasibility_from_gains(&Gains::from_vectors(ch, bf, cfg, view)?, cfg, view))
}

pub fn check_feasibility_lifted(
    ch: &ChannelSet,
    x: &LiftedBeams,
    cfg: &SystemConfig,
    view: EveView,
) -> Result<FeasibilityReport, MetricsError> {
    Ok(feasibility_from_gains(&Gains::from_lifted(ch, x, cfg, view)?, cfg, view))
}
