//! Scenario configuration, planar-array steering vectors, Rician-shadowed
//! channels and the bounded-error eavesdropper CSI model.
//!
//! Channels are kept in physical units (amplitudes in √W scale, powers in W).
//! The CSI error bounds `e_h`, `e_g` in [`SystemConfig`] are relative: the
//! error radius for Eve's BS1 link is `e_h·‖h_es‖₂`, and likewise for BS2.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{c, CVec};

const LIGHT_SPEED: f64 = 299_792_458.0;

/// Independent random streams derived from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Geometry = 1,
    Fading = 2,
    Csi = 3,
    Randomization = 4,
    Restart = 5,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RicianParams {
    pub carrier_hz: f64,
    pub path_loss_exponent: f64,
    /// Mean NLoS power relative to the LoS power.
    pub nlos_power_ratio: f64,
    /// Constant antenna directivity ρ(θ, φ).
    pub directivity: f64,
}

impl Default for RicianParams {
    fn default() -> Self {
        Self { carrier_hz: 18e9, path_loss_exponent: 2.5, nlos_power_ratio: 0.1, directivity: 1.0 }
    }
}

impl RicianParams {
    pub fn wavelength(&self) -> f64 {
        LIGHT_SPEED / self.carrier_hz
    }

    /// Large-scale power gain `(λ/4π)²·d^(−ple)`.
    pub fn path_gain(&self, distance: f64) -> f64 {
        (self.wavelength() / (4.0 * PI)).powi(2) * distance.powf(-self.path_loss_exponent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Geometry {
    pub cell_radius: f64,
    pub min_distance: f64,
    pub bs1_position: [f64; 3],
    pub bs2_position: [f64; 3],
    pub node_height: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            cell_radius: 120.0,
            min_distance: 10.0,
            bs1_position: [0.0, 0.0, 10.0],
            bs2_position: [60.0, 0.0, 10.0],
            node_height: 1.5,
        }
    }
}

/// All scenario scalars in SI-linear units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    #[serde(rename = "M11")]
    pub m11: usize,
    #[serde(rename = "M12")]
    pub m12: usize,
    #[serde(rename = "M21")]
    pub m21: usize,
    #[serde(rename = "M22")]
    pub m22: usize,
    #[serde(rename = "N")]
    pub n_users: usize,
    pub sigma2: f64,
    #[serde(rename = "P1_max")]
    pub p1_max: f64,
    #[serde(rename = "P2_max")]
    pub p2_max: f64,
    #[serde(rename = "P0")]
    pub p0: f64,
    pub gamma_th: f64,
    #[serde(rename = "I_S")]
    pub i_s: f64,
    #[serde(rename = "I_c")]
    pub i_c: f64,
    #[serde(rename = "I_p")]
    pub i_p: f64,
    pub kappa2: f64,
    pub e_h: f64,
    pub e_g: f64,
    #[serde(rename = "T")]
    pub t_paths: usize,
    pub eta: f64,
    pub l_x: f64,
    pub l_y: f64,
    pub rician: RicianParams,
    pub geometry: Geometry,
    pub rng_seed: u64,
}

impl Default for SystemConfig {
    /// Desk-scale scenario: 18 GHz, 2×2 arrays, two users, 10 W budgets,
    /// unit rate thresholds. The noise power is −90 dBm, 10 dB below the
    /// full-scale value, to offset the smaller arrays.
    fn default() -> Self {
        let rician = RicianParams::default();
        let lambda = rician.wavelength();
        Self {
            m11: 2,
            m12: 2,
            m21: 2,
            m22: 2,
            n_users: 2,
            sigma2: 1e-12,
            p1_max: 10.0,
            p2_max: 10.0,
            p0: 2.0,
            gamma_th: 0.5,
            i_s: 1.0,
            i_c: 1.0,
            i_p: 1.0,
            kappa2: 1e9,
            e_h: 0.05,
            e_g: 0.05,
            t_paths: 3,
            eta: 2.0 * PI / lambda,
            l_x: lambda / 2.0,
            l_y: lambda / 2.0,
            rician,
            geometry: Geometry::default(),
            rng_seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot parse scenario: {0}")]
    Parse(String),
}

impl SystemConfig {
    /// Full-scale scenario: 12-element arrays at both base stations, four
    /// users and −80 dBm noise.
    pub fn full_scale() -> Self {
        let mut cfg = Self { n_users: 4, sigma2: 1e-11, ..Self::default() };
        cfg.set_m1(12);
        cfg.set_m2(12);
        cfg
    }

    pub fn m1(&self) -> usize {
        self.m11 * self.m12
    }

    pub fn m2(&self) -> usize {
        self.m21 * self.m22
    }

    pub fn bs1_array(&self) -> ArrayGeometry {
        ArrayGeometry { m_h: self.m11, m_e: self.m12, eta: self.eta, l_x: self.l_x, l_y: self.l_y }
    }

    pub fn bs2_array(&self) -> ArrayGeometry {
        ArrayGeometry { m_h: self.m21, m_e: self.m22, eta: self.eta, l_x: self.l_x, l_y: self.l_y }
    }

    /// Square-ish factorization `m = rows × cols` with `rows ≥ cols`.
    pub fn grid_for(m: usize) -> (usize, usize) {
        let mut best = (m, 1);
        for cols in 1..=m {
            if m % cols == 0 && cols <= m / cols {
                best = (m / cols, cols);
            }
        }
        best
    }

    pub fn set_m1(&mut self, m: usize) {
        (self.m11, self.m12) = Self::grid_for(m);
    }

    pub fn set_m2(&mut self, m: usize) {
        (self.m21, self.m22) = Self::grid_for(m);
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("sigma2", self.sigma2),
            ("P1_max", self.p1_max),
            ("P2_max", self.p2_max),
            ("P0", self.p0),
            ("kappa2", self.kappa2),
            ("gamma_th", self.gamma_th),
            ("eta", self.eta),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::Invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [("e_h", self.e_h), ("e_g", self.e_g), ("I_S", self.i_s), ("I_c", self.i_c), ("I_p", self.i_p)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::Invalid(format!("{name} must be nonnegative, got {v}")));
            }
        }
        if self.m1() == 0 || self.m2() == 0 {
            return Err(ConfigError::Invalid("antenna grids must be nonempty".into()));
        }
        if self.n_users == 0 {
            return Err(ConfigError::Invalid("at least one RSMA user is required".into()));
        }
        if self.rician.carrier_hz <= 0.0 || self.rician.directivity < 0.0 || self.rician.nlos_power_ratio < 0.0 {
            return Err(ConfigError::Invalid("rician parameters out of range".into()));
        }
        if self.geometry.cell_radius <= self.geometry.min_distance {
            return Err(ConfigError::Invalid("cell radius must exceed the minimum distance".into()));
        }
        Ok(())
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// On-disk scenario. Every field is optional and overrides the default;
/// powers may be given linearly (`P1_max`, W) or in dBW (`P1_max_dBW`),
/// noise in W (`sigma2`) or dBm (`sigma2_dBm`). `M1`/`M2` pick a near-square
/// grid unless `M11`.. are given.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(rename = "M1")]
    pub m1: Option<usize>,
    #[serde(rename = "M11")]
    pub m11: Option<usize>,
    #[serde(rename = "M12")]
    pub m12: Option<usize>,
    #[serde(rename = "M2")]
    pub m2: Option<usize>,
    #[serde(rename = "M21")]
    pub m21: Option<usize>,
    #[serde(rename = "M22")]
    pub m22: Option<usize>,
    #[serde(rename = "N")]
    pub n_users: Option<usize>,
    pub sigma2: Option<f64>,
    #[serde(rename = "sigma2_dBm")]
    pub sigma2_dbm: Option<f64>,
    #[serde(rename = "P1_max")]
    pub p1_max: Option<f64>,
    #[serde(rename = "P1_max_dBW")]
    pub p1_max_dbw: Option<f64>,
    #[serde(rename = "P2_max")]
    pub p2_max: Option<f64>,
    #[serde(rename = "P2_max_dBW")]
    pub p2_max_dbw: Option<f64>,
    #[serde(rename = "P0")]
    pub p0: Option<f64>,
    #[serde(rename = "P0_dBW")]
    pub p0_dbw: Option<f64>,
    pub gamma_th: Option<f64>,
    #[serde(rename = "I_S")]
    pub i_s: Option<f64>,
    #[serde(rename = "I_c")]
    pub i_c: Option<f64>,
    #[serde(rename = "I_p")]
    pub i_p: Option<f64>,
    pub kappa2: Option<f64>,
    pub e_h: Option<f64>,
    pub e_g: Option<f64>,
    #[serde(rename = "T")]
    pub t_paths: Option<usize>,
    pub eta: Option<f64>,
    pub l_x: Option<f64>,
    pub l_y: Option<f64>,
    pub rician: Option<RicianParams>,
    pub geometry: Option<Geometry>,
    pub rng_seed: Option<u64>,
    /// Passed through untouched to the optimizer settings.
    pub optimizer: Option<serde_json::Value>,
}

fn pick(linear: Option<f64>, db: Option<f64>, offset_db: f64, name: &str) -> Result<Option<f64>, ConfigError> {
    match (linear, db) {
        (Some(_), Some(_)) => Err(ConfigError::Invalid(format!("{name} given both linearly and in dB"))),
        (Some(v), None) => Ok(Some(v)),
        (None, Some(d)) => Ok(Some(db_to_linear(d - offset_db))),
        (None, None) => Ok(None),
    }
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn into_config(self) -> Result<SystemConfig, ConfigError> {
        let mut cfg = SystemConfig::default();
        if let Some(r) = self.rician {
            cfg.rician = r;
            let lambda = cfg.rician.wavelength();
            cfg.eta = 2.0 * PI / lambda;
            cfg.l_x = lambda / 2.0;
            cfg.l_y = lambda / 2.0;
        }
        if let Some(m) = self.m1 {
            cfg.set_m1(m);
        }
        if let Some(m) = self.m2 {
            cfg.set_m2(m);
        }
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            };
        }
        set!(m11);
        set!(m12);
        set!(m21);
        set!(m22);
        if let (Some(m), Some(a), Some(b)) = (self.m1, self.m11, self.m12) {
            if a * b != m {
                return Err(ConfigError::Invalid(format!("M11×M12 = {} differs from M1 = {m}", a * b)));
            }
        }
        if let (Some(m), Some(a), Some(b)) = (self.m2, self.m21, self.m22) {
            if a * b != m {
                return Err(ConfigError::Invalid(format!("M21×M22 = {} differs from M2 = {m}", a * b)));
            }
        }
        set!(n_users);
        set!(gamma_th);
        set!(i_s);
        set!(i_c);
        set!(i_p);
        set!(kappa2);
        set!(e_h);
        set!(e_g);
        set!(t_paths);
        set!(eta);
        set!(l_x);
        set!(l_y);
        set!(rng_seed);
        if let Some(g) = self.geometry {
            cfg.geometry = g;
        }
        if let Some(v) = pick(self.sigma2, self.sigma2_dbm, 30.0, "sigma2")? {
            cfg.sigma2 = v;
        }
        if let Some(v) = pick(self.p1_max, self.p1_max_dbw, 0.0, "P1_max")? {
            cfg.p1_max = v;
        }
        if let Some(v) = pick(self.p2_max, self.p2_max_dbw, 0.0, "P2_max")? {
            cfg.p2_max = v;
        }
        if let Some(v) = pick(self.p0, self.p0_dbw, 0.0, "P0")? {
            cfg.p0 = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Uniform planar array with `m_h` horizontal and `m_e` vertical elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    pub m_h: usize,
    pub m_e: usize,
    pub eta: f64,
    pub l_x: f64,
    pub l_y: f64,
}

impl ArrayGeometry {
    pub fn len(&self) -> usize {
        self.m_h * self.m_e
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `u_h(θ,φ) ⊗ u_e(θ)`.
    pub fn response(&self, theta: f64, phi: f64) -> CVec {
        let (uh, ue) = steering_vectors(theta, phi, self.m_h, self.m_e, self.eta, self.l_x, self.l_y);
        kron(&uh, &ue)
    }
}

fn symmetric_phases(m: usize, step: f64) -> CVec {
    let center = (m as f64 - 1.0) / 2.0;
    CVec::from_fn(m, |i, _| Complex64::from_polar(1.0, step * (i as f64 - center)))
}

/// Horizontal and vertical steering vectors of a planar array; element
/// phases run symmetrically from `−(M−1)/2` to `(M−1)/2` steps.
pub fn steering_vectors(theta: f64, phi: f64, m11: usize, m12: usize, eta: f64, l_x: f64, l_y: f64) -> (CVec, CVec) {
    let uh = symmetric_phases(m11, eta * l_x * theta.sin() * phi.cos());
    let ue = symmetric_phases(m12, eta * l_y * theta.cos());
    (uh, ue)
}

pub fn kron(a: &CVec, b: &CVec) -> CVec {
    CVec::from_fn(a.len() * b.len(), |k, _| a[k / b.len()] * b[k % b.len()])
}

/// One propagation path: directivity gain, complex amplitude and angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathParams {
    pub rho: f64,
    pub alpha: Complex64,
    pub theta: f64,
    pub phi: f64,
}

/// LoS path `paths[0]` plus `(1/√T)·Σ` over the `T` NLoS paths `paths[1..=T]`.
pub fn sample_channel(paths: &[PathParams], t: usize, array: &ArrayGeometry) -> CVec {
    assert!(paths.len() > t, "need one LoS path plus {t} NLoS paths");
    let term = |p: &PathParams| array.response(p.theta, p.phi) * (p.alpha * p.rho.sqrt());
    let mut h = term(&paths[0]);
    if t > 0 {
        let scale = c(1.0 / (t as f64).sqrt(), 0.0);
        for p in &paths[1..=t] {
            h += term(p) * scale;
        }
    }
    h
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(s * re, s * im)
}

/// Error vector drawn uniformly from the complex ball of radius `e_bound`.
pub fn perturb_csi<R: Rng + ?Sized>(h_es: &CVec, e_bound: f64, rng: &mut R) -> CVec {
    let m = h_es.len();
    let dir = CVec::from_fn(m, |_, _| complex_gaussian(rng, 1.0));
    let norm = dir.norm();
    if e_bound == 0.0 || norm == 0.0 {
        return CVec::zeros(m);
    }
    let u: f64 = rng.random();
    let radius = e_bound * u.powf(1.0 / (2.0 * m as f64));
    dir * c(radius / norm, 0.0)
}

/// Operator-norm bound on `Δ = h hᴴ − h_s h_sᴴ` used by the robust constraints.
pub fn csi_matrix_bound(e: f64) -> f64 {
    3.0 * e * e
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsiUncertainty {
    pub e_h_ub: f64,
    pub e_g_ub: f64,
}

/// Direction of a node seen from a transmitter: polar angle from the
/// vertical axis and azimuth from the x axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
    pub distance: f64,
}

fn direction(from: [f64; 3], to: [f64; 3]) -> Direction {
    let d = [to[0] - from[0], to[1] - from[1], to[2] - from[2]];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    Direction { theta: (d[2] / r).acos(), phi: d[1].atan2(d[0]), distance: r }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeLayout {
    pub bob: [f64; 3],
    pub eve: [f64; 3],
    pub target: [f64; 3],
    pub clutter: [f64; 3],
    pub users: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h_bo: CVec,
    pub h_ta: CVec,
    pub h_cl: CVec,
    pub h_n: Vec<CVec>,
    pub g_bo: CVec,
    pub g_n: Vec<CVec>,
    pub h_es: CVec,
    pub h_er: CVec,
    pub g_es: CVec,
    pub g_er: CVec,
    /// Absolute error radii `‖h_er‖ ≤ e_h_abs`, `‖g_er‖ ≤ e_g_abs`.
    pub e_h_abs: f64,
    pub e_g_abs: f64,
    pub layout: NodeLayout,
}

impl ChannelSet {
    pub fn h_e(&self) -> CVec {
        &self.h_es + &self.h_er
    }

    pub fn g_e(&self) -> CVec {
        &self.g_es + &self.g_er
    }

    pub fn uncertainty(&self) -> CsiUncertainty {
        CsiUncertainty { e_h_ub: csi_matrix_bound(self.e_h_abs), e_g_ub: csi_matrix_bound(self.e_g_abs) }
    }

    pub fn n_users(&self) -> usize {
        self.h_n.len()
    }

    /// Copy with Eve's true channel replaced by `estimate + error`.
    pub fn with_eve_errors(&self, h_er: CVec, g_er: CVec) -> Self {
        let mut out = self.clone();
        out.h_er = h_er;
        out.g_er = g_er;
        out
    }

    pub fn is_finite(&self) -> bool {
        [&self.h_bo, &self.h_ta, &self.h_cl, &self.g_bo, &self.h_es, &self.h_er, &self.g_es, &self.g_er]
            .into_iter()
            .chain(&self.h_n)
            .chain(&self.g_n)
            .all(|v| v.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }
}

fn place_node<R: Rng + ?Sized>(rng: &mut R, g: &Geometry) -> [f64; 3] {
    loop {
        let r = g.cell_radius * rng.random::<f64>().sqrt();
        let a = rng.random::<f64>() * 2.0 * PI;
        let p = [r * a.cos(), r * a.sin(), g.node_height];
        let far = [g.bs1_position, g.bs2_position]
            .iter()
            .all(|bs| (p[0] - bs[0]).hypot(p[1] - bs[1]) >= g.min_distance);
        if far {
            return p;
        }
    }
}

/// Node positions drawn uniformly over the cell disc.
pub fn sample_layout(cfg: &SystemConfig, seed: u64) -> NodeLayout {
    let mut rng = stream_rng(seed, Stream::Geometry);
    let g = &cfg.geometry;
    let bob = place_node(&mut rng, g);
    let eve = place_node(&mut rng, g);
    let target = place_node(&mut rng, g);
    let clutter = place_node(&mut rng, g);
    let users = (0..cfg.n_users).map(|_| place_node(&mut rng, g)).collect();
    NodeLayout { bob, eve, target, clutter, users }
}

/// Link from a transmitter to a node: LoS amplitude `√β·e^{jψ}` with fixed
/// modulus, NLoS amplitudes `CN(0, ratio·β)` at uniformly random angles.
fn link<R: Rng + ?Sized>(cfg: &SystemConfig, array: &ArrayGeometry, from: [f64; 3], to: [f64; 3], rng: &mut R) -> CVec {
    let dir = direction(from, to);
    let beta = cfg.rician.path_gain(dir.distance);
    let rho = cfg.rician.directivity;
    let mut paths = Vec::with_capacity(cfg.t_paths + 1);
    let psi = rng.random::<f64>() * 2.0 * PI;
    paths.push(PathParams { rho, alpha: Complex64::from_polar(beta.sqrt(), psi), theta: dir.theta, phi: dir.phi });
    for _ in 0..cfg.t_paths {
        let theta = rng.random::<f64>() * PI;
        let phi = (rng.random::<f64>() * 2.0 - 1.0) * PI;
        paths.push(PathParams { rho, alpha: complex_gaussian(rng, cfg.rician.nlos_power_ratio * beta), theta, phi });
    }
    sample_channel(&paths, cfg.t_paths, array)
}

/// Draws every channel of the network for one trial. Geometry, fading and
/// CSI errors come from separate streams of `seed`, so changing the CSI
/// error level or power budgets leaves the other draws untouched.
pub fn generate_channels(cfg: &SystemConfig, seed: u64) -> ChannelSet {
    let layout = sample_layout(cfg, seed);
    let mut fade = stream_rng(seed, Stream::Fading);
    let (a1, a2) = (cfg.bs1_array(), cfg.bs2_array());
    let (p1, p2) = (cfg.geometry.bs1_position, cfg.geometry.bs2_position);
    let h_bo = link(cfg, &a1, p1, layout.bob, &mut fade);
    let h_es = link(cfg, &a1, p1, layout.eve, &mut fade);
    let h_ta = link(cfg, &a1, p1, layout.target, &mut fade);
    let h_cl = link(cfg, &a1, p1, layout.clutter, &mut fade);
    let h_n = layout.users.iter().map(|u| link(cfg, &a1, p1, *u, &mut fade)).collect();
    let g_bo = link(cfg, &a2, p2, layout.bob, &mut fade);
    let g_es = link(cfg, &a2, p2, layout.eve, &mut fade);
    let g_n = layout.users.iter().map(|u| link(cfg, &a2, p2, *u, &mut fade)).collect();

    let mut csi = stream_rng(seed, Stream::Csi);
    let e_h_abs = cfg.e_h * h_es.norm();
    let e_g_abs = cfg.e_g * g_es.norm();
    let h_er = perturb_csi(&h_es, e_h_abs, &mut csi);
    let g_er = perturb_csi(&g_es, e_g_abs, &mut csi);
    ChannelSet { h_bo, h_ta, h_cl, h_n, g_bo, g_n, h_es, h_er, g_es, g_er, e_h_abs, e_g_abs, layout }
}

/// Directions of every node as seen from BS2 (for beampatterns).
pub fn bs2_user_directions(cfg: &SystemConfig, layout: &NodeLayout) -> Vec<Direction> {
    layout.users.iter().map(|u| direction(cfg.geometry.bs2_position, *u)).collect()
}

pub fn bs1_direction(cfg: &SystemConfig, node: [f64; 3]) -> Direction {
    direction(cfg.geometry.bs1_position, node)
}
