use isac_core::linalg::{c, CVec};
use isac_core::metrics::{
    check_feasibility, evaluate, evaluate_lifted, sinr_bob_comm, sinr_bob_sensing, sinr_eve_comm, sinr_eve_sensing, sinr_rsma,
    BeamformerSet, EveView, LiftedBeams, MetricsError,
};
use isac_core::sysmodel::{complex_gaussian, generate_channels, stream_rng, ChannelSet, Stream, SystemConfig};
use proptest::prelude::*;

fn s(x: f64) -> CVec {
    CVec::from_element(1, c(x, 0.0))
}

/// Single-antenna network with hand-picked gains, unit noise and κ² = 3.
fn scalar_case() -> (SystemConfig, ChannelSet, BeamformerSet) {
    let mut cfg = SystemConfig { sigma2: 1.0, kappa2: 3.0, p0: 2.0, ..SystemConfig::default() };
    cfg.set_m1(1);
    cfg.set_m2(1);
    let mut ch = generate_channels(&cfg, 0);
    ch.h_bo = s(2.0);
    ch.h_es = s(1.0);
    ch.h_er = s(0.0);
    ch.g_bo = s(1.0);
    ch.g_es = s(1.0);
    ch.g_er = s(0.0);
    ch.h_ta = s(1.0);
    ch.h_n = vec![s(1.0), s(1.0)];
    ch.g_n = vec![s(1.0), s(2.0)];
    ch.e_h_abs = 0.0;
    ch.e_g_abs = 0.0;
    let bf = BeamformerSet { a: s(1.0), w_bo: s(1.0), w_ta: s(1.0), o_c: s(1.0), o_p: vec![s(1.0), s(1.0)] };
    (cfg, ch, bf)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

#[test]
fn sinrs_match_hand_computed_values() {
    let (cfg, ch, bf) = scalar_case();
    assert!(close(sinr_bob_sensing(&ch, &bf, 1.0), 0.5));
    assert!(close(sinr_bob_comm(&ch, &bf, 1.0), 1.0));
    assert!(close(sinr_eve_sensing(&ch, &bf, 1.0), 0.2));
    assert!(close(sinr_eve_comm(&ch, &bf, 1.0), 0.2));
    let (gc, gp) = sinr_rsma(&ch, &bf, 1.0, 2).unwrap();
    assert!(close(gc, 4.0 / 11.0) && close(gp, 4.0 / 7.0));
    assert_eq!(sinr_rsma(&ch, &bf, 1.0, 0), Err(MetricsError::UserIndex(0, 2)));
    assert_eq!(sinr_rsma(&ch, &bf, 1.0, 3), Err(MetricsError::UserIndex(3, 2)));

    let m = evaluate(&ch, &bf, &cfg).unwrap();
    assert!(close(m.gamma_c[0], 0.2) && close(m.gamma_n[0], 0.25));
    assert!(close(m.r_c, 1.2f64.log2()));
    assert!(close(m.r_s, 1.0 - 1.2f64.log2()));
    assert!(close(m.gamma_b1, 3.0));
    assert!(close(m.p1, 2.0) && close(m.p2, 3.0) && close(m.p_sum, 7.0));
    assert!(close(m.see, (1.0 - 1.2f64.log2()) / 7.0));
}

#[test]
fn optimizer_view_widens_eve_gains() {
    let (cfg, mut ch, bf) = scalar_case();
    ch.e_h_abs = 0.1;
    let m = evaluate_lifted(&ch, &LiftedBeams::from_vectors(&bf), &cfg, EveView::Optimizer).unwrap();
    // e_UB = 3·0.1², applied to unit-power W_bo and W_ta.
    assert!(close(m.gamma_e_bo, 1.03 / (0.97 + 3.0 + 1.0)));
    assert!(close(m.gamma_e_ta, 1.03 / (0.97 + 3.0 + 1.0)));
}

#[test]
fn zero_filter_is_rejected() {
    let (cfg, ch, mut bf) = scalar_case();
    bf.a = s(0.0);
    assert_eq!(evaluate(&ch, &bf, &cfg).unwrap_err(), MetricsError::ZeroFilter);
}

#[test]
fn feasibility_flags_power_overrun() {
    let (mut cfg, ch, bf) = scalar_case();
    cfg.p1_max = 1.0;
    let report = check_feasibility(&ch, &bf, &cfg, false).unwrap();
    let p = report.get("bs1_power").unwrap();
    assert!(!p.satisfied && close(p.residual, 1.0));
    assert!(!report.all_satisfied());
    assert!(report.max_residual() >= 1.0);
}

#[test]
fn zero_signal_gives_zero_rate_and_see() {
    let (cfg, ch, mut bf) = scalar_case();
    bf.w_bo = s(0.0);
    let m = evaluate(&ch, &bf, &cfg).unwrap();
    assert_eq!(m.gamma_bo_bo, 0.0);
    assert_eq!(m.r_s, 0.0);
    assert_eq!(m.see, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lifted_and_vector_metrics_agree(seed in 0u64..500) {
        let cfg = SystemConfig::default();
        let ch = generate_channels(&cfg, seed);
        let mut rng = stream_rng(seed, Stream::Randomization);
        let mut v = |m: usize| CVec::from_fn(m, |_, _| complex_gaussian(&mut rng, 1.0));
        let bf = BeamformerSet { a: v(cfg.m1()), w_bo: v(cfg.m1()), w_ta: v(cfg.m1()), o_c: v(cfg.m2()), o_p: vec![v(cfg.m2()), v(cfg.m2())] };
        let a = evaluate(&ch, &bf, &cfg).unwrap();
        let b = evaluate_lifted(&ch, &LiftedBeams::from_vectors(&bf), &cfg, EveView::Audit).unwrap();
        for (x, y) in a.csv_row().iter().zip(b.csv_row()) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{} vs {}", x, y);
        }
        prop_assert!(a.r_s >= 0.0 && a.see >= 0.0);
    }
}
