use conic::embed::{embed, unembed};
use conic::{solve, validate, BlockKind, ConicProgram, LinExpr, Settings, Status};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn one_dimensional_lp() {
    let mut p = ConicProgram::new();
    let x = p.add_block("x", BlockKind::Nonneg);
    p.objective = LinExpr::var(x, -1.0);
    p.add_ge("x>=1", LinExpr::var(x, 1.0).add_const(-1.0));
    let s = solve(&p, &Settings::default()).unwrap();
    assert_eq!(s.status, Status::Optimal);
    assert!((s.scalar(x) - 1.0).abs() < 1e-6);
    assert!((s.objective + 1.0).abs() < 1e-6);
}

#[test]
fn soc_boundary() {
    let mut p = ConicProgram::new();
    let t = p.add_block("t", BlockKind::Free);
    p.objective = LinExpr::var(t, 1.0);
    p.add_soc("cone", LinExpr::var(t, 1.0), vec![LinExpr::constant(0.6), LinExpr::constant(0.8)]);
    p.add_ge("t<=1", LinExpr::constant(1.0).plus(&LinExpr::var(t, 1.0), -1.0));
    let s = solve(&p, &Settings::default()).unwrap();
    assert_eq!(s.status, Status::Optimal);
    assert!((s.scalar(t) - 1.0).abs() < 1e-6);
}

#[test]
fn sdp_smallest_eigenvalue() {
    let mut p = ConicProgram::new();
    let x = p.add_block("X", BlockKind::Psd(3));
    let cm = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]));
    p.objective = LinExpr::constant(0.0).re_trace(x, &cm).scaled(-1.0);
    p.add_eq("trace", LinExpr::constant(-1.0).re_trace(x, &DMatrix::identity(3, 3)));
    let s = solve(&p, &Settings::default()).unwrap();
    assert_eq!(s.status, Status::Optimal);
    assert!((s.objective + 1.0).abs() < 1e-6);
    let xv = s.hermitian(x);
    assert!((xv[(0, 0)].re - 1.0).abs() < 1e-5);
    assert!(xv[(1, 1)].re.abs() < 1e-5 && xv[(2, 2)].re.abs() < 1e-5);
}

#[test]
fn diagonal_grid_agrees_with_sdp() {
    // Brute force over diagonal X on the simplex grid.
    let d = [1.0, 2.0, 3.0];
    let mut best = f64::INFINITY;
    let steps = 200;
    for i in 0..=steps {
        for j in 0..=steps - i {
            let a = i as f64 / steps as f64;
            let b = j as f64 / steps as f64;
            best = best.min(d[0] * a + d[1] * b + d[2] * (1.0 - a - b));
        }
    }
    assert!((best - 1.0).abs() < 1e-12);
}

#[test]
fn complex_hermitian_sdp_hits_top_eigenvector() {
    // max Re Tr(C X), Tr X = 1 → λ_max(C) with C complex Hermitian.
    let cm = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
    let mut p = ConicProgram::new();
    let x = p.add_block("X", BlockKind::Psd(2));
    p.objective = LinExpr::constant(0.0).re_trace(x, &cm);
    p.add_eq("trace", LinExpr::constant(-1.0).re_trace(x, &DMatrix::identity(2, 2)));
    let s = solve(&p, &Settings::default()).unwrap();
    assert_eq!(s.status, Status::Optimal);
    assert!((s.objective - 2.0).abs() < 1e-6);
}

#[test]
fn validate_flags_structural_problems() {
    let mut p = ConicProgram::new();
    let x = p.add_block("X", BlockKind::Psd(2));
    p.add_eq("trace", LinExpr::constant(-1.0).re_trace(x, &DMatrix::identity(2, 2)));
    assert!(validate(&p).is_empty());

    let mut q = p.clone();
    q.constraints.push(conic::Constraint::Ineq {
        name: "skew".into(),
        expr: LinExpr {
            constant: 0.0,
            terms: vec![conic::Term::Trace { block: x, coef: DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]) }],
        },
    });
    let d = validate(&q);
    assert_eq!(d.len(), 1);
    assert!(d[0].contains("skew"));

    let mut r = p.clone();
    r.objective = LinExpr::var(7, 1.0);
    let d = validate(&r);
    assert_eq!(d.len(), 1);
    assert!(d[0].contains("objective"));

    let mut nan = p.clone();
    nan.objective = LinExpr::constant(f64::NAN);
    assert!(solve(&nan, &Settings::default()).is_err());
    assert!(solve(&ConicProgram::new(), &Settings::default()).is_err());
}

#[test]
fn json_dump_round_trips() {
    let mut p = ConicProgram::new();
    let x = p.add_block("X", BlockKind::Psd(2));
    let t = p.add_block("t", BlockKind::Soc(3));
    p.objective = LinExpr::constant(0.5).scalar(t, 0, -1.0);
    p.add_soc("s", LinExpr::var(t, 1.0), vec![LinExpr::constant(0.0).im_trace(x, &DMatrix::identity(2, 2))]);
    let back = ConicProgram::from_json(&p.to_json()).unwrap();
    assert_eq!(back, p);
}

#[test]
fn infeasible_program_is_reported() {
    let mut p = ConicProgram::new();
    let x = p.add_block("x", BlockKind::Nonneg);
    p.objective = LinExpr::var(x, 1.0);
    p.add_ge("x<=-1", LinExpr::constant(-1.0).plus(&LinExpr::var(x, 1.0), -1.0));
    let s = solve(&p, &Settings::default()).unwrap();
    assert_eq!(s.status, Status::InfeasibleSuspected);
}

fn box_program(cx: f64, cy: f64, center: (f64, f64), radius: f64, scale: f64) -> (ConicProgram, usize, usize) {
    let mut p = ConicProgram::new();
    let x = p.add_block("x", BlockKind::Free);
    let y = p.add_block("y", BlockKind::Free);
    p.objective = LinExpr::var(x, cx * scale).plus(&LinExpr::var(y, cy * scale), 1.0);
    for (b, name) in [(x, "x"), (y, "y")] {
        p.add_ge(&format!("{name}>=0"), LinExpr::var(b, 1.0));
        p.add_ge(&format!("{name}<=1"), LinExpr::constant(1.0).plus(&LinExpr::var(b, 1.0), -1.0));
    }
    p.add_soc(
        "disc",
        LinExpr::constant(radius),
        vec![LinExpr::var(x, 1.0).add_const(-center.0), LinExpr::var(y, 1.0).add_const(-center.1)],
    );
    (p, x, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn embedding_round_trips_exactly(vals in proptest::collection::vec(-5.0f64..5.0, 32)) {
        let d = 4;
        let m = DMatrix::from_fn(d, d, |i, j| c(vals[i * d + j], vals[16 + i * d + j]));
        let h = &m + m.adjoint();
        prop_assert_eq!(unembed(&embed(&h)), h);
    }

    #[test]
    fn matches_grid_search(cx in -1.0f64..1.0, cy in -1.0f64..1.0, ox in 0.3f64..0.7, oy in 0.3f64..0.7, r in 0.2f64..0.6) {
        let (p, x, y) = box_program(cx, cy, (ox, oy), r, 1.0);
        let s = solve(&p, &Settings::default()).unwrap();
        prop_assert_eq!(s.status, Status::Optimal);
        let mut best = f64::NEG_INFINITY;
        let n = 1000;
        for i in 0..=n {
            let a = i as f64 / n as f64;
            for j in 0..=n {
                let b = j as f64 / n as f64;
                if (a - ox).hypot(b - oy) <= r {
                    best = best.max(cx * a + cy * b);
                }
            }
        }
        prop_assert!((s.objective - best).abs() < 5e-3, "{} vs {}", s.objective, best);
        prop_assert!(s.gap <= 10.0 * 1e-7);
        let _ = (s.scalar(x), s.scalar(y));
    }

    #[test]
    fn lp_argmax_invariant_under_objective_scaling(cx in 0.1f64..1.0, cy in -1.0f64..-0.1, k in 0.2f64..50.0) {
        let build = |scale: f64| {
            let mut p = ConicProgram::new();
            let x = p.add_block("x", BlockKind::Nonneg);
            let y = p.add_block("y", BlockKind::Nonneg);
            p.objective = LinExpr::var(x, cx * scale).plus(&LinExpr::var(y, cy * scale), 1.0);
            p.add_ge("x<=1", LinExpr::constant(1.0).plus(&LinExpr::var(x, 1.0), -1.0));
            p.add_ge("x+y<=1.5", LinExpr::constant(1.5).plus(&LinExpr::var(x, 1.0), -1.0).plus(&LinExpr::var(y, 1.0), -1.0));
            (p, x, y)
        };
        let (p1, x, y) = build(1.0);
        let (p2, _, _) = build(k);
        let s1 = solve(&p1, &Settings::default()).unwrap();
        let s2 = solve(&p2, &Settings::default()).unwrap();
        prop_assert!((s1.scalar(x) - s2.scalar(x)).abs() <= 1e-6);
        prop_assert!((s1.scalar(y) - s2.scalar(y)).abs() <= 1e-6);
    }

    #[test]
    fn curved_argmax_stable_under_objective_scaling(cx in 0.1f64..1.0, cy in -1.0f64..-0.1, k in 0.2f64..50.0) {
        // On a strictly curved boundary the tangential error scales like √gap.
        let (p1, x, y) = box_program(cx, cy, (0.5, 0.5), 0.4, 1.0);
        let (p2, _, _) = box_program(cx, cy, (0.5, 0.5), 0.4, k);
        let s1 = solve(&p1, &Settings::default()).unwrap();
        let s2 = solve(&p2, &Settings::default()).unwrap();
        let tol = 10.0 * 1e-7f64.sqrt();
        prop_assert!((s1.scalar(x) - s2.scalar(x)).abs() < tol);
        prop_assert!((s1.scalar(y) - s2.scalar(y)).abs() < tol);
    }
}
