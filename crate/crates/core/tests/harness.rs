use std::f64::consts::PI;
use std::process::Command;

use isac_core::alternating::{optimize, OptimizerSettings};
use isac_core::harness::{
    beampattern, persist_solution, run_sweep, selftest, AngleGrid, CurveTable, SweepParam, SweepSpec, BEAMPATTERN_HEADER, TRACE_HEADER,
};
use isac_core::linalg::c;
use isac_core::sysmodel::{generate_channels, ArrayGeometry, SystemConfig};
use proptest::prelude::*;

fn spec(param: SweepParam, values: &[f64], trials: usize, seed: u64) -> SweepSpec {
    SweepSpec { param, values: values.to_vec(), trials, base: SystemConfig::default(), seed, settings: OptimizerSettings::default() }
}

#[test]
fn curve_header_is_stable() {
    let h = CurveTable::csv_header();
    let expect = [
        "value", "trials", "flagged", "SEE_mean", "SEE_se", "R_S_mean", "R_S_se", "SEE_robust_mean", "SEE_robust_se", "R_S_robust_mean",
        "R_S_robust_se", "gamma_b1_mean", "gamma_b1_se", "R_c_mean", "R_c_se", "P1_mean", "P1_se", "P2_mean", "P2_se", "P_sum_mean",
        "P_sum_se", "iterations_mean", "iterations_se",
    ];
    assert_eq!(h, expect);
    assert_eq!(TRACE_HEADER, ["outer", "see", "bs1_iterations", "bs2_iterations", "echo_ms", "bs1_ms", "bs2_ms", "flag"]);
    assert_eq!(BEAMPATTERN_HEADER, ["stream", "theta_deg", "phi_deg", "gain_db"]);
}

#[test]
fn sweeps_share_channels_and_reproduce() {
    let s = spec(SweepParam::P2Max, &[3.0, 10.0], 2, 40);
    let a = run_sweep(&s).unwrap();
    let b = run_sweep(&s).unwrap();
    assert_eq!(a.rows, b.rows);
    let seeds = |v: f64| a.trials.iter().filter(|t| t.value == v).map(|t| t.seed).collect::<Vec<_>>();
    assert_eq!(seeds(3.0), vec![40, 41]);
    assert_eq!(seeds(3.0), seeds(10.0));
    let mut out = Vec::new();
    a.write_csv(&mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), 3);
}

#[test]
fn single_trial_sweep_equals_direct_optimization() {
    let s = spec(SweepParam::P1Max, &[10.0], 1, 5);
    let table = run_sweep(&s).unwrap();
    let cfg = SystemConfig { rng_seed: 5, ..SystemConfig::default() };
    let sol = optimize(&cfg, &generate_channels(&cfg, 5), &OptimizerSettings::default()).unwrap();
    let m = sol.metrics.expect("feasible");
    assert_eq!(table.rows[0].stats[0], (m.see, 0.0));
    assert_eq!(table.trials[0].iterations, sol.iterations);
}

#[test]
fn run_directory_holds_solution_trace_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SystemConfig::default();
    let sol = optimize(&cfg, &generate_channels(&cfg, cfg.rng_seed), &OptimizerSettings::default()).unwrap();
    persist_solution(dir.path(), &sol, &cfg).unwrap();
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), sol.trace.len() + 1);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("solution.json")).unwrap()).unwrap();
    assert!(json["bf"]["w_bo"].is_array());
    let back: SystemConfig = serde_json::from_str(&std::fs::read_to_string(dir.path().join("config.snapshot.json")).unwrap()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn selftest_passes() {
    for check in selftest(0) {
        assert!(check.passed, "{}: {}", check.name, check.detail);
    }
}

fn isac(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_isac")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(isac(&["--bogus"]).0, 1);
    assert_eq!(isac(&["optimize", "--bogus"]).0, 1);
    assert_eq!(isac(&["--help"]).0, 0);
    assert_eq!(isac(&["selftest"]).0, 0);

    let (code, _) = isac(&["optimize", "--out", out, "--seed", "1", "--run-id", "ok"]);
    assert_eq!(code, 0);
    for f in ["solution.json", "trace.csv", "config.snapshot.json"] {
        assert!(dir.path().join("ok").join(f).exists(), "{f}");
    }

    let cfg = dir.path().join("tight.json");
    std::fs::write(&cfg, r#"{"P2_max": 1e-12}"#).unwrap();
    let (code, _) = isac(&["optimize", "--config", cfg.to_str().unwrap(), "--out", out, "--run-id", "tight"]);
    assert_eq!(code, 2);

    let (code, _) = isac(&["sweep", "--sweep", "P2_max=1,5,10", "--trials", "1", "--out", out, "--run-id", "sw"]);
    assert_eq!(code, 0);
    let curves = std::fs::read_to_string(dir.path().join("sw").join("curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 4);
    assert_eq!(isac(&["sweep", "--sweep", "P3=1", "--out", out]).0, 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steering_beam_peaks_at_its_angle(i0 in 2usize..29, j0 in 0usize..60) {
        let arr = ArrayGeometry { m_h: 4, m_e: 3, eta: 2.0 * PI, l_x: 0.5, l_y: 0.5 };
        let grid = AngleGrid::uniform(31, 60);
        let w = arr.response(grid.theta[i0], grid.phi[j0]) * c(1.0, 0.0);
        let p = beampattern(&w, &grid, &arr);
        let (i, j) = p.argmax();
        let peak = p.gain_db[i][j];
        // Ties from the array's front/back symmetry are allowed.
        prop_assert!((p.gain_db[i0][j0] - peak).abs() < 1e-9);
    }
}
