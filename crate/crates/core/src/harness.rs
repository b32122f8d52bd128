//! Monte Carlo sweeps, beampatterns, run persistence and the self-test
//! suite behind the `isac` command line.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alternating::{optimize, OptimizerSettings, Solution, SolveStatus};
use crate::linalg::{c, outer, CVec};
use crate::metrics::Metrics;
use crate::sysmodel::{generate_channels, ArrayGeometry, SystemConfig};

/// Gain assigned to exact zeros, in dB.
pub const DB_FLOOR: f64 = -120.0;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "P1_max")]
    P1Max,
    #[serde(rename = "P2_max")]
    P2Max,
    /// Both CSI error bounds `e_h = e_g`.
    #[serde(rename = "e")]
    E,
    M1,
}

impl FromStr for SweepParam {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P1_max" => Ok(Self::P1Max),
            "P2_max" => Ok(Self::P2Max),
            "e" => Ok(Self::E),
            "M1" => Ok(Self::M1),
            _ => Err(HarnessError::Sweep(format!("unknown parameter `{s}` (expected P1_max, P2_max, e or M1)"))),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::P1Max => "P1_max",
            Self::P2Max => "P2_max",
            Self::E => "e",
            Self::M1 => "M1",
        })
    }
}

impl SweepParam {
    /// Copy of `cfg` with this parameter set to `v`.
    pub fn apply(&self, cfg: &SystemConfig, v: f64) -> SystemConfig {
        let mut out = cfg.clone();
        match self {
            Self::P1Max => out.p1_max = v,
            Self::P2Max => out.p2_max = v,
            Self::E => {
                out.e_h = v;
                out.e_g = v;
            }
            Self::M1 => out.set_m1(v.round() as usize),
        }
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub trials: usize,
    pub base: SystemConfig,
    pub seed: u64,
    #[serde(default)]
    pub settings: OptimizerSettings,
}

impl SweepSpec {
    /// Parses `name=v1,v2,...`.
    pub fn parse_values(arg: &str) -> Result<(SweepParam, Vec<f64>), HarnessError> {
        let (name, list) = arg.split_once('=').ok_or_else(|| HarnessError::Sweep(format!("expected name=v1,v2,... in `{arg}`")))?;
        let param = name.trim().parse()?;
        let values = list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| HarnessError::Sweep(format!("bad value `{v}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((param, values))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.values.is_empty() {
            return Err(HarnessError::Sweep("value list is empty".into()));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) || self.values.iter().any(|v| !v.is_finite()) {
            return Err(HarnessError::Sweep("values must be finite and strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(HarnessError::Sweep("trials must be at least 1".into()));
        }
        if self.param == SweepParam::M1 && self.values.iter().any(|v| *v < 1.0 || v.fract() != 0.0) {
            return Err(HarnessError::Sweep("M1 values must be positive integers".into()));
        }
        for &v in &self.values {
            self.param.apply(&self.base, v).validate().map_err(|e| HarnessError::Sweep(format!("{}={v}: {e}", self.param)))?;
        }
        Ok(())
    }

    /// Channel seed of trial `t`, shared by every sweep value.
    pub fn trial_seed(&self, t: usize) -> u64 {
        self.seed.wrapping_add(t as u64)
    }
}

/// Outcome of one trial at one sweep value.
#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub value: f64,
    pub trial: usize,
    pub seed: u64,
    pub status: SolveStatus,
    pub iterations: usize,
    /// Audit-view metrics; `None` when the trial was infeasible.
    pub metrics: Option<Metrics>,
    /// Worst case over the CSI error set (optimizer view) of the same beams.
    pub robust_metrics: Option<Metrics>,
    pub sdr_slack: Option<f64>,
}

/// Metrics averaged by [`run_sweep`], in CSV column order.
/// Names ending in `_robust` are worst-case values over the CSI error set.
pub const CURVE_METRICS: [&str; 10] = ["SEE", "R_S", "SEE_robust", "R_S_robust", "gamma_b1", "R_c", "P1", "P2", "P_sum", "iterations"];

fn metric_value(t: &TrialResult, name: &str) -> Option<f64> {
    let m = t.metrics.as_ref()?;
    let r = t.robust_metrics.as_ref();
    Some(match name {
        "SEE_robust" => r?.see,
        "R_S_robust" => r?.r_s,
        "SEE" => m.see,
        "R_S" => m.r_s,
        "gamma_b1" => m.gamma_b1,
        "R_c" => m.r_c,
        "P1" => m.p1,
        "P2" => m.p2,
        "P_sum" => m.p_sum,
        "iterations" => t.iterations as f64,
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub value: f64,
    /// Feasible trials.
    pub count: usize,
    /// No trial at this value was feasible.
    pub flagged: bool,
    /// `(mean, standard error)` per entry of [`CURVE_METRICS`].
    pub stats: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveTable {
    pub param: SweepParam,
    pub rows: Vec<CurveRow>,
    pub trials: Vec<TrialResult>,
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    match xs.len() {
        0 => (f64::NAN, f64::NAN),
        1 => (xs[0], 0.0),
        n => {
            let mean = xs.iter().sum::<f64>() / n as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (mean, (var / n as f64).sqrt())
        }
    }
}

impl CurveTable {
    pub fn csv_header() -> Vec<String> {
        let mut h = vec!["value".to_string(), "trials".to_string(), "flagged".to_string()];
        for m in CURVE_METRICS {
            h.push(format!("{m}_mean"));
            h.push(format!("{m}_se"));
        }
        h
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), HarnessError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(Self::csv_header())?;
        for r in &self.rows {
            let mut rec = vec![r.value.to_string(), r.count.to_string(), (r.flagged as u8).to_string()];
            for (m, s) in &r.stats {
                rec.push(m.to_string());
                rec.push(s.to_string());
            }
            out.write_record(rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Per-trial values of `metric` at each sweep value, `None` where infeasible.
    pub fn paired(&self, metric: &str) -> Vec<Vec<Option<f64>>> {
        self.rows
            .iter()
            .map(|r| self.trials.iter().filter(|t| t.value == r.value).map(|t| metric_value(t, metric)).collect())
            .collect()
    }

    /// Means of `metric` over trials feasible at every sweep value.
    pub fn paired_means(&self, metric: &str) -> Vec<f64> {
        let p = self.paired(metric);
        let n = p.first().map_or(0, |r| r.len());
        let keep: Vec<usize> = (0..n).filter(|&t| p.iter().all(|r| r[t].is_some())).collect();
        p.iter()
            .map(|r| {
                if keep.is_empty() {
                    f64::NAN
                } else {
                    keep.iter().map(|&t| r[t].unwrap_or(f64::NAN)).sum::<f64>() / keep.len() as f64
                }
            })
            .collect()
    }

    pub fn column(&self, metric: &str) -> Option<usize> {
        CURVE_METRICS.iter().position(|m| *m == metric)
    }
}

/// Runs every (value, trial) pair in parallel and averages audit-view
/// metrics per value. Trial `t` uses the same channel seed at every value.
pub fn run_sweep(spec: &SweepSpec) -> Result<CurveTable, HarnessError> {
    spec.validate()?;
    let jobs: Vec<(f64, usize)> = spec.values.iter().flat_map(|&v| (0..spec.trials).map(move |t| (v, t))).collect();
    let trials: Vec<TrialResult> = jobs
        .par_iter()
        .map(|&(value, trial)| {
            let seed = spec.trial_seed(trial);
            let mut cfg = spec.param.apply(&spec.base, value);
            cfg.rng_seed = seed;
            let ch = generate_channels(&cfg, seed);
            let sol = optimize(&cfg, &ch, &spec.settings).ok();
            let status = sol.as_ref().map_or(SolveStatus::Infeasible, |s| s.status);
            let feasible = status != SolveStatus::Infeasible;
            TrialResult {
                value,
                trial,
                seed,
                status,
                iterations: sol.as_ref().map_or(0, |s| s.iterations),
                metrics: sol.as_ref().and_then(|s| s.metrics.clone()).filter(|_| feasible),
                robust_metrics: sol.as_ref().and_then(|s| s.optimizer_metrics.clone()).filter(|_| feasible),
                sdr_slack: sol.as_ref().and_then(|s| s.sdr_slack.as_ref().map(|x| x.relative)),
            }
        })
        .collect();
    let rows = spec
        .values
        .iter()
        .map(|&v| {
            let here: Vec<&TrialResult> = trials.iter().filter(|t| t.value == v).collect();
            let count = here.iter().filter(|t| t.metrics.is_some()).count();
            let stats = CURVE_METRICS
                .iter()
                .map(|m| mean_se(&here.iter().filter_map(|t| metric_value(t, m)).collect::<Vec<_>>()))
                .collect();
            CurveRow { value: v, count, flagged: count == 0, stats }
        })
        .collect();
    Ok(CurveTable { param: spec.param, rows, trials })
}

/// Polar and azimuth sample points in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl AngleGrid {
    /// `n_theta` points over `[0, π]` and `n_phi` over `[−π, π)`.
    pub fn uniform(n_theta: usize, n_phi: usize) -> Self {
        use std::f64::consts::PI;
        let theta = (0..n_theta).map(|i| if n_theta == 1 { PI / 2.0 } else { PI * i as f64 / (n_theta - 1) as f64 }).collect();
        let phi = (0..n_phi).map(|j| -PI + 2.0 * PI * j as f64 / n_phi as f64).collect();
        Self { theta, phi }
    }
}

/// Transmit gain over an angle grid, in dB relative to an isotropic
/// radiator: `|r(θ, φ)ᴴ w|² / ‖w‖²`, where `r` is the array response with
/// unit-modulus entries. A matched beam reaches `10·log₁₀ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPattern {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// `gain_db[i][j]` at `(theta[i], phi[j])`.
    pub gain_db: Vec<Vec<f64>>,
}

fn to_db(g: f64) -> f64 {
    if g > 0.0 {
        (10.0 * g.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

/// Gain of `w` toward `(θ, φ)` in dB.
pub fn gain_db(w: &CVec, array: &ArrayGeometry, theta: f64, phi: f64) -> f64 {
    let p = w.norm_squared();
    if p == 0.0 {
        return DB_FLOOR;
    }
    to_db(array.response(theta, phi).dotc(w).norm_sqr() / p)
}

pub fn beampattern(w: &CVec, grid: &AngleGrid, array: &ArrayGeometry) -> BeamPattern {
    let gain_db = grid.theta.iter().map(|&t| grid.phi.iter().map(|&p| gain_db(w, array, t, p)).collect()).collect();
    BeamPattern { theta: grid.theta.clone(), phi: grid.phi.clone(), gain_db }
}

impl BeamPattern {
    /// Grid point of the largest gain.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for (i, row) in self.gain_db.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                if g > best.2 {
                    best = (i, j, g);
                }
            }
        }
        (best.0, best.1)
    }

    pub fn median_db(&self) -> f64 {
        let mut all: Vec<f64> = self.gain_db.iter().flatten().copied().collect();
        all.sort_by(f64::total_cmp);
        let n = all.len();
        if n == 0 {
            return f64::NAN;
        }
        if n % 2 == 1 { all[n / 2] } else { 0.5 * (all[n / 2 - 1] + all[n / 2]) }
    }

    /// Azimuth cut at the polar row holding the peak: `(φ, gain_db)`.
    pub fn peak_cut(&self) -> Vec<(f64, f64)> {
        let (i, _) = self.argmax();
        self.phi.iter().copied().zip(self.gain_db.get(i).cloned().unwrap_or_default()).collect()
    }
}

pub const BEAMPATTERN_HEADER: [&str; 4] = ["stream", "theta_deg", "phi_deg", "gain_db"];

/// Writes `(stream, θ, φ, gain)` rows for several named patterns.
pub fn write_beampatterns<W: io::Write>(w: W, patterns: &[(String, BeamPattern)]) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(BEAMPATTERN_HEADER)?;
    for (name, p) in patterns {
        for (i, row) in p.gain_db.iter().enumerate() {
            for (j, g) in row.iter().enumerate() {
                out.write_record([name.clone(), p.theta[i].to_degrees().to_string(), p.phi[j].to_degrees().to_string(), g.to_string()])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub const TRACE_HEADER: [&str; 8] = ["outer", "see", "bs1_iterations", "bs2_iterations", "echo_ms", "bs1_ms", "bs2_ms", "flag"];

pub fn write_trace<W: io::Write>(w: W, sol: &Solution) -> Result<(), HarnessError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRACE_HEADER)?;
    for r in &sol.trace {
        out.write_record([
            r.outer.to_string(),
            r.see.to_string(),
            r.bs1_iterations.to_string(),
            r.bs2_iterations.to_string(),
            r.echo_ms.to_string(),
            r.bs1_ms.to_string(),
            r.bs2_ms.to_string(),
            r.flag.clone(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Patterns of the common stream and every private stream of BS2.
pub fn bs2_patterns(sol: &Solution, cfg: &SystemConfig, grid: &AngleGrid) -> Vec<(String, BeamPattern)> {
    let array = cfg.bs2_array();
    let mut out = vec![("common".to_string(), beampattern(&sol.bf.o_c, grid, &array))];
    for (k, o) in sol.bf.o_p.iter().enumerate() {
        out.push((format!("private_{}", k + 1), beampattern(o, grid, &array)));
    }
    out
}

/// Output directory of one run: `<out>/<run_id>`.
pub fn run_dir(out: &Path, run_id: &str) -> Result<PathBuf, HarnessError> {
    let dir = out.join(run_id);
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// Writes `solution.json`, `trace.csv` and `config.snapshot.json`.
pub fn persist_solution(dir: &Path, sol: &Solution, cfg: &SystemConfig) -> Result<(), HarnessError> {
    write_json(&dir.join("solution.json"), sol)?;
    write_trace(fs::File::create(dir.join("trace.csv"))?, sol)?;
    write_json(&dir.join("config.snapshot.json"), cfg)?;
    Ok(())
}

/// One named self-test check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.to_string(), passed, detail }
}

/// Fast invariant suite over random instances.
pub fn selftest(seed: u64) -> Vec<Check> {
    use crate::bs1_bf::{mm_log_upper_bound, quadratic_transform_updates, sca_lift};
    use crate::bs2_bf::{exp_rate_linearize, taylor_bilinear_bound, trace_product_check};
    use crate::echo_bf::{echo_filter, rank1_eigenvalue};
    use crate::linalg::{min_eigenvalue, quad};
    use crate::sysmodel::{complex_gaussian, stream_rng, Stream};
    use rand::Rng;

    let mut rng = stream_rng(seed, Stream::Randomization);
    let mut out = Vec::new();
    let randv = |rng: &mut rand_chacha::ChaCha20Rng, m: usize| CVec::from_fn(m, |_, _| complex_gaussian(rng, 1.0));

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let arr = ArrayGeometry { m_h: 2, m_e: 2, eta: std::f64::consts::TAU, l_x: 0.5, l_y: 0.5 };
        let r = arr.response(rng.random_range(0.0..3.1), rng.random_range(-3.1..3.1));
        worst = worst.max(r.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max));
    }
    out.push(check("steering_unit_modulus", worst < 1e-12, format!("max deviation {worst:e}")));

    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (h, w1, w2) = (randv(&mut rng, 4), randv(&mut rng, 4), randv(&mut rng, 4));
        let w = outer(&w1, &w1) + outer(&w2, &w2);
        let (lam, a) = echo_filter(&h, &w, 2.0, 1.0).unwrap_or((0.0, CVec::zeros(4)));
        let scnr = 1.0 * h.dotc(&a).norm_sqr() * quad(&h, &w) / a.norm_squared();
        let exact = rank1_eigenvalue(&h, &w, 2.0, 1.0);
        worst = worst.max(((scnr - exact) / exact).abs()).max(((lam - exact) / exact).abs());
    }
    out.push(check("echo_filter_optimal", worst < 1e-8, format!("max relative error {worst:e}")));

    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (b, e, w) = (randv(&mut rng, 3), randv(&mut rng, 3), randv(&mut rng, 3));
        let (l, r) = trace_product_check(&b, &e, &w);
        worst = worst.max((l - r).abs() / l.max(1e-300));
    }
    out.push(check("trace_product_identity", worst < 1e-12, format!("max relative gap {worst:e}")));

    let mut bad = 0;
    for _ in 0..1000 {
        let (z, z0) = (rng.random_range(1e-3..1e3), rng.random_range(1e-3..1e3));
        if mm_log_upper_bound(z, z0).unwrap_or(f64::NEG_INFINITY) < z.log2() - 1e-12 {
            bad += 1;
        }
        let (x, x0) = (rng.random_range(-5.0..10.0), rng.random_range(-5.0..10.0));
        if exp_rate_linearize(x, x0, 1.0) > 2f64.powf(x) - 1.0 + 1e-12 * 2f64.powf(x.max(x0)) {
            bad += 1;
        }
    }
    out.push(check("tangent_bounds", bad == 0, format!("{bad} violations")));

    let b = taylor_bilinear_bound(1.0, 1.0).map(|b| b.slack(1.0, 1.0, 1.0));
    out.push(check("bilinear_touching", b == Ok(0.0), format!("{b:?}")));

    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (r, p) = (rng.random_range(0.0..10.0), rng.random_range(0.1..50.0));
        let (ra, _) = quadratic_transform_updates(r, p, 0.0, 0.0).unwrap_or((0.0, 0.0));
        worst = worst.max((2.0 * ra * r.sqrt() - ra * ra * p - r / p).abs());
    }
    out.push(check("quadratic_transform_tight", worst < 1e-12, format!("max gap {worst:e}")));

    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (wi, w) = (randv(&mut rng, 4), randv(&mut rng, 4));
        worst = worst.min(min_eigenvalue(&(outer(&w, &w) - sca_lift(&wi, &w))));
    }
    out.push(check("sca_lift_minorizes", worst >= -1e-10, format!("min eigenvalue {worst:e}")));

    let arr = ArrayGeometry { m_h: 4, m_e: 2, eta: std::f64::consts::TAU, l_x: 0.5, l_y: 0.5 };
    let grid = AngleGrid::uniform(31, 60);
    let (i0, j0) = (20, 13);
    let w = arr.response(grid.theta[i0], grid.phi[j0]) * c(1.0, 0.0);
    let (i, j) = beampattern(&w, &grid, &arr).argmax();
    let ok = (i as i64 - i0 as i64).abs() <= 1 && (j as i64 - j0 as i64).abs() <= 1;
    out.push(check("beampattern_peak", ok, format!("peak at ({i}, {j}), built at ({i0}, {j0})")));

    let lp = {
        use conic::{BlockKind, ConicProgram, LinExpr, Settings};
        let mut p = ConicProgram::new();
        let x = p.add_block("x", BlockKind::Nonneg);
        let y = p.add_block("y", BlockKind::Nonneg);
        p.add_ge("cap", LinExpr::constant(4.0).plus(&LinExpr::var(x, 1.0), -1.0).plus(&LinExpr::var(y, 1.0), -2.0));
        p.objective = LinExpr::var(x, 1.0).plus(&LinExpr::var(y, 1.0), 1.0);
        conic::solve(&p, &Settings::default()).map(|s| s.objective)
    };
    out.push(check("conic_lp", matches!(lp, Ok(v) if (v - 4.0).abs() < 1e-6), format!("{lp:?}")));

    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_argument_parsing() {
        let (p, v) = SweepSpec::parse_values("P2_max=1,5,10").unwrap();
        assert_eq!(p, SweepParam::P2Max);
        assert_eq!(v, vec![1.0, 5.0, 10.0]);
        assert!(SweepSpec::parse_values("P3=1").is_err());
        assert!(SweepSpec::parse_values("e=0.1,x").is_err());
        assert!(SweepSpec::parse_values("e").is_err());
    }

    #[test]
    fn sweep_validation() {
        let spec = |values: Vec<f64>, trials| SweepSpec {
            param: SweepParam::P1Max,
            values,
            trials,
            base: SystemConfig::default(),
            seed: 0,
            settings: OptimizerSettings::default(),
        };
        assert!(spec(vec![1.0, 2.0], 1).validate().is_ok());
        assert!(spec(vec![], 1).validate().is_err());
        assert!(spec(vec![2.0, 1.0], 1).validate().is_err());
        assert!(spec(vec![1.0, 1.0], 1).validate().is_err());
        assert!(spec(vec![1.0], 0).validate().is_err());
        assert!(spec(vec![-1.0], 1).validate().is_err());
    }

    #[test]
    fn zero_beam_is_floored() {
        let arr = ArrayGeometry { m_h: 2, m_e: 2, eta: std::f64::consts::TAU, l_x: 0.5, l_y: 0.5 };
        let p = beampattern(&CVec::zeros(4), &AngleGrid::uniform(5, 8), &arr);
        assert!(p.gain_db.iter().flatten().all(|&g| g == DB_FLOOR));
    }

    #[test]
    fn standard_error_of_constant_is_zero() {
        assert_eq!(mean_se(&[2.0, 2.0, 2.0]), (2.0, 0.0));
        assert_eq!(mean_se(&[3.0]), (3.0, 0.0));
        assert!(mean_se(&[]).0.is_nan());
    }
}
