use isac_core::alternating::{complexity_estimate, optimize, rank1_extract, ExtractError, OptimizerSettings, SolveStatus};
use isac_core::linalg::{c, outer, trace_re, CMat, CVec};
use isac_core::sysmodel::{complex_gaussian, generate_channels, stream_rng, Stream, SystemConfig};
use proptest::prelude::*;

fn randv(seed: u64, m: usize) -> CVec {
    let mut rng = stream_rng(seed, Stream::Randomization);
    CVec::from_fn(m, |_, _| complex_gaussian(&mut rng, 1.0))
}

#[test]
fn rank_two_matrix_is_randomized_at_full_power() {
    let (u, v) = (randv(1, 4), randv(2, 4));
    let w = outer(&u, &u) + outer(&v, &v);
    let mut rng = stream_rng(3, Stream::Randomization);
    let (x, randomized) = rank1_extract(&w, 1e-3, 50, &mut rng).unwrap();
    assert!(randomized);
    assert!((x.norm_squared() - trace_re(&w)).abs() <= 1e-9 * trace_re(&w));
}

#[test]
fn indefinite_matrix_is_rejected() {
    let w = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(-0.5, 0.0)]));
    let mut rng = stream_rng(0, Stream::Randomization);
    assert!(matches!(rank1_extract(&w, 1e-3, 10, &mut rng), Err(ExtractError::Indefinite(_))));
}

#[test]
fn complexity_grows_with_every_dimension() {
    let base = SystemConfig::default();
    let at = |m1: usize, m2: usize, n: usize| {
        let mut cfg = SystemConfig { n_users: n, ..base.clone() };
        cfg.set_m1(m1);
        cfg.set_m2(m2);
        complexity_estimate(&cfg)
    };
    assert!(at(1, 1, 1) > 0.0 && at(1, 1, 1).is_finite());
    assert!(at(4, 4, 2) < at(6, 4, 2));
    assert!(at(4, 4, 2) < at(4, 6, 2));
    assert!(at(4, 4, 2) < at(4, 4, 3));
}

#[test]
fn optimization_is_deterministic_per_seed() {
    let cfg = SystemConfig { rng_seed: 2, ..SystemConfig::default() };
    let ch = generate_channels(&cfg, 2);
    let settings = OptimizerSettings::default();
    let a = optimize(&cfg, &ch, &settings).unwrap();
    let b = optimize(&cfg, &ch, &settings).unwrap();
    assert_eq!(a.status, b.status);
    assert_eq!(a.bf, b.bf);
    let see = |s: &isac_core::alternating::Solution| s.trace.iter().map(|r| r.see).collect::<Vec<_>>();
    assert_eq!(see(&a), see(&b));
}

#[test]
fn converged_run_has_monotone_trace_and_feasible_covariances() {
    let cfg = SystemConfig { rng_seed: 1, ..SystemConfig::default() };
    let ch = generate_channels(&cfg, 1);
    let sol = optimize(&cfg, &ch, &OptimizerSettings::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Converged, "{:?}", sol.message);
    assert_eq!(sol.trace[0].outer, 0);
    assert_eq!(sol.trace.len(), sol.iterations + 1);
    assert!(sol.trace.windows(2).all(|w| w[1].see >= w[0].see - 1e-6));
    assert!(sol.lifted_feasibility.as_ref().unwrap().max_residual() <= 1e-6);
    let slack = sol.sdr_slack.as_ref().unwrap();
    assert!(slack.relative >= slack.see_loss && slack.see_loss >= 0.0);
    assert!(sol.metrics.as_ref().unwrap().see > 0.0);
}

#[test]
fn impossible_rate_threshold_is_infeasible() {
    let cfg = SystemConfig { i_s: 60.0, ..SystemConfig::default() };
    let ch = generate_channels(&cfg, 1);
    let sol = optimize(&cfg, &ch, &OptimizerSettings::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Infeasible);
    assert!(sol.metrics.is_none());
    assert_eq!(sol.init_attempts, OptimizerSettings::default().init_attempts);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_one_matrix_round_trips(seed in 0u64..10_000, m in 1usize..7, p in 1e-3f64..1e3) {
        let w = randv(seed, m) * c(p.sqrt(), 0.0);
        let big = outer(&w, &w);
        let mut rng = stream_rng(seed, Stream::Randomization);
        let (x, randomized) = rank1_extract(&big, 1e-3, 10, &mut rng).unwrap();
        prop_assert!(!randomized);
        prop_assert!((outer(&x, &x) - &big).norm() <= 1e-9 * big.norm());
    }
}
