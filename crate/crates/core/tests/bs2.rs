use isac_core::alternating::{optimize, OptimizerSettings, SolveStatus};
use isac_core::bs2_bf::{exp_rate_linearize, security_lmi_terms, security_soc_constraint, solve_bs2, taylor_bilinear_bound, Bs2Error};
use isac_core::linalg::{c, quad, trace_re, CVec};
use isac_core::metrics::{BeamformerSet, LiftedBeams};
use isac_core::problem::{vars, Problem, StageSettings};
use isac_core::sysmodel::{complex_gaussian, generate_channels, stream_rng, ChannelSet, Stream, SystemConfig};
use proptest::prelude::*;

fn initial_point(cfg: &SystemConfig, ch: &ChannelSet) -> LiftedBeams {
    let settings = OptimizerSettings { max_outer: 0, ..OptimizerSettings::default() };
    optimize(cfg, ch, &settings).expect("optimizer").lifted
}

fn randv(rng: &mut rand_chacha::ChaCha20Rng, m: usize, p: f64) -> CVec {
    let v = CVec::from_fn(m, |_, _| complex_gaussian(rng, 1.0));
    &v * c((p / v.norm_squared()).sqrt(), 0.0)
}

fn random_point(seed: u64, cfg: &SystemConfig, ch: &ChannelSet) -> BeamformerSet {
    use rand::Rng;
    let mut rng = stream_rng(seed, Stream::Randomization);
    let mut p = || 10f64.powf(rng.random_range(-3.0..1.0));
    let powers: Vec<f64> = (0..3 + cfg.n_users).map(|_| p()).collect();
    let mut rng = stream_rng(seed, Stream::Restart);
    BeamformerSet {
        a: ch.h_ta.clone(),
        w_bo: randv(&mut rng, cfg.m1(), powers[0]),
        w_ta: randv(&mut rng, cfg.m1(), powers[1]),
        o_c: randv(&mut rng, cfg.m2(), powers[2]),
        o_p: (0..cfg.n_users).map(|k| randv(&mut rng, cfg.m2(), powers[3 + k])).collect(),
    }
}

fn exact_csi() -> SystemConfig {
    SystemConfig { e_h: 0.0, e_g: 0.0, ..SystemConfig::default() }
}

#[test]
fn u1_at_tau_two_without_bs2_power() {
    let cfg = exact_csi();
    let ch = generate_channels(&cfg, 2);
    let mut bf = random_point(2, &cfg, &ch);
    bf.o_c = CVec::zeros(cfg.m2());
    bf.o_p = vec![CVec::zeros(cfg.m2()); cfg.n_users];
    let x = LiftedBeams::from_vectors(&bf);
    let prob = Problem::new(&cfg, &ch, &ch.h_ta);
    assert_eq!(prob.tau, 2.0);
    let (u1, _) = security_lmi_terms(&prob).unwrap();
    let b = quad(&ch.h_bo, &x.w_bo) / cfg.sigma2;
    assert!((u1.eval(&vars(&x)) - (b - 1.0)).abs() <= 1e-12 * b.max(1.0));
}

#[test]
fn product_form_is_equivalent_to_the_rate_condition() {
    // (τ−1)U1U2 − τBE = (τ−1)[(a+B)d − τa(d+E)] with a, d the Bob and Eve
    // interference-plus-noise terms.
    let cfg = exact_csi();
    for seed in 0..200u64 {
        let ch = generate_channels(&cfg, seed % 10);
        let prob = Problem::new(&cfg, &ch, &ch.h_ta);
        let x = LiftedBeams::from_vectors(&random_point(seed, &cfg, &ch));
        let v = vars(&x);
        let (u1, u2) = security_lmi_terms(&prob).unwrap();
        let t = prob.tau;
        let b = quad(&ch.h_bo, &x.w_bo) / cfg.sigma2;
        let e = quad(&ch.h_es, &x.w_bo) / cfg.sigma2;
        let a = 1.0 + quad(&ch.g_bo, &x.o_sum()) / cfg.sigma2;
        let d = 1.0 + (quad(&ch.g_es, &x.o_sum()) + quad(&ch.h_es, &x.w_ta)) / cfg.sigma2;
        let lhs = (t - 1.0) * u1.eval(&v) * u2.eval(&v) - t * b * e;
        let rhs = (t - 1.0) * ((a + b) * d - t * a * (d + e));
        let scale = ((t - 1.0) * u1.eval(&v) * u2.eval(&v)).abs().max(t * b * e).max(1.0);
        assert!((lhs - rhs).abs() <= 1e-9 * scale, "seed {seed}: {lhs} vs {rhs}");
        let rate = ((1.0 + b / a) / (1.0 + e / d)).log2();
        if (rate - cfg.i_s).abs() > 1e-9 {
            assert_eq!(lhs >= 0.0, rate >= cfg.i_s, "seed {seed}");
        }
    }
}

#[test]
fn soc_squared_form_matches_product_form() {
    let cfg = exact_csi();
    for seed in 0..100u64 {
        let ch = generate_channels(&cfg, seed % 10);
        let prob = Problem::new(&cfg, &ch, &ch.h_ta);
        let x = LiftedBeams::from_vectors(&random_point(seed, &cfg, &ch));
        let v = vars(&x);
        let (head, tail) = security_soc_constraint(&prob).unwrap();
        let (u1, u2) = security_lmi_terms(&prob).unwrap();
        let (h, t2) = (head.eval(&v), tail.iter().map(|a| a.eval(&v).powi(2)).sum::<f64>());
        let k = prob.tau / (prob.tau - 1.0);
        let b = quad(&ch.h_bo, &x.w_bo) / cfg.sigma2;
        let e = quad(&ch.h_es, &x.w_bo) / cfg.sigma2;
        let expect = 4.0 * (u1.eval(&v) * u2.eval(&v) - k * b * e);
        assert!((h * h - t2 - expect).abs() <= 1e-9 * (h * h).max(t2), "seed {seed}");
    }
}

#[test]
fn reaches_least_power_with_jamming_disabled() {
    // One user, Bob orthogonal to the user at BS2 and no BS2 path to Eve:
    // BS2 power then only costs, so the optimum is the least power meeting
    // the private and common rate floors, both beams matched to the user.
    let mut cfg = SystemConfig { e_h: 0.0, e_g: 0.0, n_users: 1, ..SystemConfig::default() };
    cfg.set_m2(2);
    let mut ch = generate_channels(&cfg, 3);
    let g = ch.g_n[0].clone();
    let scale = c(ch.g_bo.norm() / g.norm(), 0.0);
    ch.g_bo = CVec::from_vec(vec![-g[1].conj(), g[0].conj()]) * scale;
    ch.g_es = CVec::zeros(2);
    ch.g_er = CVec::zeros(2);
    let x0 = initial_point(&cfg, &ch);
    let prob = Problem::new(&cfg, &ch, &x0.a);
    assert!(prob.max_violation(&vars(&x0)) <= 1e-7, "infeasible start");
    let s = solve_bs2(&x0, &ch, &cfg, &StageSettings::default()).expect("bs2");
    let p2 = trace_re(&s.o_c) + s.o_n.iter().map(trace_re).sum::<f64>();

    let gain = g.norm_squared() / cfg.sigma2;
    let bs1 = quad(&ch.h_n[0], &(&x0.w_bo + &x0.w_ta)) / cfg.sigma2;
    let (qc, qp) = (2f64.powf(cfg.i_c) - 1.0, 2f64.powf(cfg.i_p) - 1.0);
    let private = qp * (1.0 + bs1);
    let common = qc * (private + bs1 + 1.0);
    let least = (private + common) / gain;
    assert!((p2 - least).abs() <= 1e-3 * least, "stage {p2} vs least power {least}");
}

#[test]
fn vanishing_bs2_budget_is_reported_infeasible() {
    let cfg = SystemConfig { p2_max: 1e-12, ..SystemConfig::default() };
    let ch = generate_channels(&cfg, 1);
    let sol = optimize(&cfg, &ch, &OptimizerSettings::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Infeasible);
    assert!(sol.message.is_some());
}

#[test]
fn threshold_at_or_below_one_is_rejected() {
    let cfg = SystemConfig { i_s: 0.0, ..SystemConfig::default() };
    let ch = generate_channels(&cfg, 1);
    let prob = Problem::new(&cfg, &ch, &ch.h_ta);
    assert!(matches!(security_lmi_terms(&prob), Err(Bs2Error::TauTooSmall(_))));
    assert!(matches!(taylor_bilinear_bound(0.0, 1.0), Err(Bs2Error::NonPositiveExpansion(..))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bilinear_tangent_implies_product_bound(
        x7_0 in 0.1f64..50.0, x8_0 in 0.05f64..5.0, x7 in 0.1f64..50.0, x8 in 0.0f64..5.0, frac in 0.0f64..1.0,
    ) {
        let b = taylor_bilinear_bound(x7_0, x8_0).unwrap();
        // At or below the largest x1 the tangent admits.
        let bound = (b.c8 * x8 - b.c7 * x7) / b.c1;
        let x1 = bound - frac * (1.0 + bound.abs());
        prop_assert!(b.slack(x1, x7, x8) >= -1e-9 * (b.c8 * x8).max(b.c7 * x7).max(1.0));
        prop_assert!(x1 * x7 <= x8 * x8 + 1e-9 * (x8 * x8).max(1.0));
    }

    #[test]
    fn exp_tangent_lies_below(x in -5.0f64..10.0, x0 in -5.0f64..10.0, s2 in 1e-3f64..10.0) {
        let exact = s2 * (2f64.powf(x) - 1.0);
        prop_assert!(exp_rate_linearize(x, x0, s2) <= exact + 1e-12 * s2 * 2f64.powf(x.max(x0)));
    }
}
