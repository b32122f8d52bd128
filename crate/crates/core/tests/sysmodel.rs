use std::f64::consts::PI;

use isac_core::linalg::{c, CVec};
use isac_core::sysmodel::{
    complex_gaussian, generate_channels, perturb_csi, sample_channel, stream_rng, ArrayGeometry, PathParams, ScenarioFile, Stream,
    SystemConfig,
};
use proptest::prelude::*;

fn half_wave(m_h: usize, m_e: usize) -> ArrayGeometry {
    ArrayGeometry { m_h, m_e, eta: 2.0 * PI, l_x: 0.5, l_y: 0.5 }
}

#[test]
fn steering_vector_of_two_element_row_at_broadside_end_fire() {
    // sinθ·cosφ = 1 and a half-wave spacing give a π phase step.
    let r = half_wave(2, 1).response(PI / 2.0, 0.0);
    assert!((r[0] - c(0.0, -1.0)).norm() < 1e-15);
    assert!((r[1] - c(0.0, 1.0)).norm() < 1e-15);
}

#[test]
fn steering_vector_at_zenith_is_flat_horizontally() {
    // θ = 0: no horizontal phase; vertical step π.
    let r = half_wave(2, 2).response(0.0, 1.3);
    let expect = [c(0.0, -1.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 1.0)];
    for (a, b) in r.iter().zip(expect) {
        assert!((a - b).norm() < 1e-15, "{a} vs {b}");
    }
}

#[test]
fn nlos_power_matches_monte_carlo_oracle() {
    let array = half_wave(2, 2);
    let t = 4;
    let mut rng = stream_rng(11, Stream::Fading);
    let draws = 10_000;
    let mut acc = 0.0;
    for _ in 0..draws {
        let mut paths = vec![PathParams { rho: 1.0, alpha: c(0.0, 0.0), theta: 1.0, phi: 0.5 }];
        for _ in 0..t {
            use rand::Rng;
            let theta = rng.random_range(0.0..PI);
            let phi = rng.random_range(-PI..PI);
            paths.push(PathParams { rho: 1.0, alpha: complex_gaussian(&mut rng, 1.0), theta, phi });
        }
        acc += sample_channel(&paths, t, &array).norm_squared();
    }
    // (1/T)·Σ ρ_t·E|α_t|²·M with ρ = 1, unit variance.
    let expect = array.len() as f64;
    let got = acc / draws as f64;
    assert!((got - expect).abs() / expect < 0.05, "{got} vs {expect}");
}

#[test]
fn zero_nlos_paths_reduce_to_line_of_sight() {
    let array = half_wave(3, 2);
    let los = PathParams { rho: 2.0, alpha: c(0.5, -0.5), theta: 0.7, phi: -1.1 };
    let h = sample_channel(&[los], 0, &array);
    let expect = array.response(0.7, -1.1) * (c(0.5, -0.5) * 2f64.sqrt());
    assert!((h - expect).norm() < 1e-14);
}

#[test]
fn channels_are_reproducible_per_seed() {
    let cfg = SystemConfig::default();
    let a = generate_channels(&cfg, 5);
    let b = generate_channels(&cfg, 5);
    assert_eq!(a.h_bo, b.h_bo);
    assert_eq!(a.g_n, b.g_n);
    assert_eq!(a.h_er, b.h_er);
    assert_ne!(a.h_bo, generate_channels(&cfg, 6).h_bo);
    assert!(a.is_finite());
}

#[test]
fn csi_error_level_leaves_fading_untouched() {
    let base = SystemConfig::default();
    let other = SystemConfig { e_h: 0.2, e_g: 0.2, ..base.clone() };
    let (a, b) = (generate_channels(&base, 3), generate_channels(&other, 3));
    assert_eq!(a.h_bo, b.h_bo);
    assert_eq!(a.h_es, b.h_es);
    assert!(b.h_er.norm() <= b.e_h_abs * (1.0 + 1e-12));
}

#[test]
fn zero_error_bound_gives_exact_csi() {
    let cfg = SystemConfig { e_h: 0.0, e_g: 0.0, ..SystemConfig::default() };
    let ch = generate_channels(&cfg, 1);
    assert_eq!(ch.h_er.norm(), 0.0);
    assert_eq!(ch.g_er.norm(), 0.0);
}

#[test]
fn scenario_rejects_unknown_keys_and_bad_values() {
    assert!(ScenarioFile::from_json(r#"{"no_such_key": 1}"#).is_err());
    let bad = ScenarioFile::from_json(r#"{"N": 0}"#).and_then(|f| f.into_config());
    assert!(bad.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steering_entries_have_unit_modulus(theta in 0.0f64..PI, phi in -PI..PI, mh in 1usize..5, me in 1usize..4) {
        let r = half_wave(mh, me).response(theta, phi);
        prop_assert_eq!(r.len(), mh * me);
        for z in r.iter() {
            prop_assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn csi_error_stays_in_ball(seed in 0u64..1000, e in 0.0f64..2.0, m in 1usize..9) {
        let mut rng = stream_rng(seed, Stream::Csi);
        let h = CVec::from_fn(m, |_, _| complex_gaussian(&mut rng, 1.0));
        let d = perturb_csi(&h, e, &mut rng);
        prop_assert!(d.norm() <= e * (1.0 + 1e-12));
    }
}
