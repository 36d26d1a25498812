mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, SQRT_2, TAU};

use common::{fourier_model, random_state, rng, schwinger_rabi};
use floquet_qa::floquet::{
    expand_in_modes, expand_state, floquet_decomposition, gap_factor, mode_at, one_period_fidelity, pair_weight_sum,
    raw_gap_factor,
};
use floquet_qa::linalg::{inner, max_abs_diff};
use floquet_qa::models::{build_dual, SchwingerRabiParams};
use floquet_qa::oracle;
use floquet_qa::spectrum::eigensystem;
use floquet_qa::{monodromy, propagate, CVector, Complex64, Error, IntegratorConfig};
use proptest::prelude::*;

// |sin(π√2)| to 30 digits.
const SIN_PI_SQRT2: f64 = 0.963_902_532_849_877_3;

fn phase_aligned(a: &CVector, b: &CVector) -> f64 {
    inner(a, b).norm()
}

#[test]
fn decomposition_invariants() {
    let h = fourier_model(&mut rng(3), 4, 1.7, 0.5);
    let cfg = IntegratorConfig::default();
    let m = monodromy(&h, 0.2, &cfg).unwrap().matrix;
    let d = floquet_decomposition(&h, 0.2, &cfg).unwrap();
    let half = h.omega() / 2.0;
    for (eps, mode) in d.quasienergies.iter().zip(&d.modes_t0) {
        assert!(*eps > -half && *eps <= half);
        let expected = mode * Complex64::from_polar(1.0, -eps * h.period());
        assert!((&m * mode - expected).camax() < 1e-9);
    }
    for (i, a) in d.modes_t0.iter().enumerate() {
        for (j, b) in d.modes_t0.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((inner(a, b) - Complex64::from(target)).norm() < 1e-10);
        }
    }
    assert!(d.quasienergies.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn constant_model_quasienergies_sit_on_the_zone_edge() {
    let d = floquet_decomposition(&schwinger_rabi(1.0, 0.0, 1.0), 0.0, &IntegratorConfig::default()).unwrap();
    assert!(d.quasienergies.iter().all(|e| (e - 0.5).abs() < 1e-9), "{:?}", d.quasienergies);
}

#[test]
fn driven_model_quasienergies_and_gap_factor() {
    let d = floquet_decomposition(&schwinger_rabi(1.0, FRAC_PI_2, 1.0), 0.0, &IntegratorConfig::default()).unwrap();
    let closed = oracle::example1(&SchwingerRabiParams::new(1.0, FRAC_PI_2, 1.0).unwrap()).unwrap();
    for (numeric, exact) in d.quasienergies.iter().zip(closed.quasienergies) {
        assert!((numeric - exact).abs() < 1e-9);
    }
    assert!((d.quasienergies[1] - (SQRT_2 - 1.0) / 2.0).abs() < 1e-9);
    let g = gap_factor(&d, TAU).unwrap();
    assert!((g - SIN_PI_SQRT2).abs() < 1e-9);
    assert!((raw_gap_factor(&[-SQRT_2 / 2.0, SQRT_2 / 2.0], TAU) - SIN_PI_SQRT2).abs() < 1e-15);
}

#[test]
fn gap_factor_survives_refolding() {
    let q = [-0.3, 0.1, 0.45];
    let period = TAU;
    for shift in [-3.0, -1.0, 1.0, 2.0] {
        for k in 0..3 {
            let mut moved = q;
            moved[k] += shift;
            assert!((raw_gap_factor(&moved, period) - raw_gap_factor(&q, period)).abs() < 1e-12);
        }
    }
}

#[test]
fn resonant_drive_is_reported_as_degenerate() {
    // At ω = ω₀/(2cosθ) the splitting equals one drive quantum.
    let theta: f64 = 0.3;
    let h = schwinger_rabi(1.0, theta, 1.0 / (2.0 * theta.cos()));
    let d = floquet_decomposition(&h, 0.0, &IntegratorConfig::default()).unwrap();
    assert!(raw_gap_factor(&d.quasienergies, h.period()) < 1e-10);
    assert!(matches!(gap_factor(&d, h.period()), Err(Error::DegenerateQuasienergies { .. })));
}

#[test]
fn dual_quasienergies_follow_the_shifted_drive() {
    let base = schwinger_rabi(1.0, 0.9, 0.7);
    let cfg = IntegratorConfig::default();
    let dual = build_dual(&base, &cfg).unwrap();
    let d = floquet_decomposition(&dual, 0.0, &cfg).unwrap();
    let closed = oracle::example2(&SchwingerRabiParams::new(1.0, 0.9, 0.7).unwrap()).unwrap();
    for (numeric, exact) in d.quasienergies.iter().zip(closed.quasienergies) {
        assert!((numeric - exact).abs() < 1e-8, "{:?} vs {:?}", d.quasienergies, closed.quasienergies);
    }
}

#[test]
fn dual_at_unit_rabi_frequency_has_identity_monodromy() {
    let cfg = IntegratorConfig::default();
    let dual = build_dual(&schwinger_rabi(1.0, FRAC_PI_3, 1.0), &cfg).unwrap();
    let m = monodromy(&dual, 0.0, &cfg).unwrap().matrix;
    assert!(max_abs_diff(&m, &floquet_qa::CMatrix::identity(2, 2)) < 1e-8);
    let d = floquet_decomposition(&dual, 0.0, &cfg).unwrap();
    assert!(d.quasienergies.iter().all(|e| e.abs() < 1e-8), "{:?}", d.quasienergies);
}

#[test]
fn modes_are_periodic() {
    let h = schwinger_rabi(1.0, 0.6, 1.4);
    let cfg = IntegratorConfig::default();
    let d = floquet_decomposition(&h, 0.3, &cfg).unwrap();
    assert_eq!(mode_at(&d, &h, &cfg, 0.3).unwrap(), d.modes_t0);
    let later = mode_at(&d, &h, &cfg, 0.3 + h.period()).unwrap();
    for (a, b) in later.iter().zip(&d.modes_t0) {
        assert!((a - b).camax() < 1e-8);
    }
}

#[test]
fn constant_model_modes_are_eigenstates() {
    let h = schwinger_rabi(1.0, 0.0, 1.3);
    let cfg = IntegratorConfig::default();
    let d = floquet_decomposition(&h, 0.0, &cfg).unwrap();
    let levels = eigensystem(&h, 0.0).unwrap();
    for t in [0.0, 1.1, 3.7] {
        for mode in mode_at(&d, &h, &cfg, t).unwrap() {
            let best = levels.states.iter().map(|s| phase_aligned(s, &mode)).fold(0.0, f64::max);
            assert!((best - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn expansion_of_eigenstates() {
    let cfg = IntegratorConfig::default();
    let flat = schwinger_rabi(1.0, 0.0, 1.0);
    let d = floquet_decomposition(&flat, 0.0, &cfg).unwrap();
    let ground = eigensystem(&flat, 0.0).unwrap().states[0].clone();
    let e = expand_state(&d, &ground, &flat, &cfg, 0.0).unwrap();
    assert!(e.weights.iter().any(|c| (c - 1.0).abs() < 1e-10));

    let h = schwinger_rabi(1.0, 0.1, 1.0);
    let d = floquet_decomposition(&h, 0.0, &cfg).unwrap();
    let ground = eigensystem(&h, 0.0).unwrap().states[0].clone();
    let e = expand_state(&d, &ground, &h, &cfg, 0.0).unwrap();
    let delta = oracle::example1(&SchwingerRabiParams::new(1.0, 0.1, 1.0).unwrap()).unwrap().delta();
    assert!((delta - 0.2557).abs() < 1e-4);
    assert!(e.pair_weight_sum() <= delta);
    assert!((e.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);

    let first = expand_state(&d, &d.modes_t0[0], &h, &cfg, 0.0).unwrap();
    assert!((first.weights[0] - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn floquet_states_reconstruct_the_evolution(seed in 0u64..10_000, n in 2usize..5, span in 0.1..3.0f64) {
        let mut r = rng(seed);
        let h = fourier_model(&mut r, n, 2.0, 0.3);
        let cfg = IntegratorConfig::with_steps(2048);
        let t0 = 0.25;
        let d = floquet_decomposition(&h, t0, &cfg).unwrap();
        let psi = random_state(&mut r, n);
        let t = t0 + span * h.period();
        let direct = propagate(&h, t0, t, &cfg).unwrap().matrix * &psi;
        let amplitudes = expand_in_modes(&d.modes_t0, &psi).amplitudes;
        let modes = mode_at(&d, &h, &cfg, t).unwrap();
        let mut rebuilt = CVector::zeros(n);
        for ((a, eps), mode) in amplitudes.iter().zip(&d.quasienergies).zip(&modes) {
            rebuilt += mode * (a * Complex64::from_polar(1.0, -eps * (t - t0)));
        }
        prop_assert!((rebuilt - direct).camax() < 1e-8);
    }

    #[test]
    fn one_period_fidelity_identity(seed in 0u64..10_000, n in 2usize..5) {
        let h = fourier_model(&mut rng(seed), n, 1.5, 0.4);
        let cfg = IntegratorConfig::default();
        let t0 = 0.1;
        let d = floquet_decomposition(&h, t0, &cfg).unwrap();
        let u = monodromy(&h, t0, &cfg).unwrap().matrix;
        let start = eigensystem(&h, t0).unwrap();
        let end = eigensystem(&h, t0 + h.period()).unwrap();
        for m in 0..n {
            let direct = inner(&end.states[m], &(&u * &start.states[m])).norm_sqr();
            let weights = expand_in_modes(&d.modes_t0, &start.states[m]).weights;
            let predicted = one_period_fidelity(&weights, &d.quasienergies, h.period());
            prop_assert!((direct - predicted).abs() < 1e-7, "{} vs {}", direct, predicted);
        }
    }

    #[test]
    fn weights_are_periodic(seed in 0u64..10_000, offset in 0.0..1.0f64) {
        let mut r = rng(seed);
        let h = fourier_model(&mut r, 3, 2.5, 0.3);
        let cfg = IntegratorConfig::with_steps(2048);
        let d = floquet_decomposition(&h, 0.0, &cfg).unwrap();
        let t = offset * h.period();
        let state_at = |s: f64| eigensystem(&h, s).unwrap().states[1].clone();
        let now = expand_state(&d, &state_at(t), &h, &cfg, t).unwrap().weights;
        let later = expand_state(&d, &state_at(t + h.period()), &h, &cfg, t + h.period()).unwrap().weights;
        for (a, b) in now.iter().zip(&later) {
            prop_assert!((a - b).abs() < 1e-8);
        }
        prop_assert!((pair_weight_sum(&now) - pair_weight_sum(&later)).abs() < 1e-8);
    }
}

#[test]
fn quasienergy_matches_closed_form_across_parameters() {
    let cfg = IntegratorConfig::default();
    for &(theta, omega) in &[(0.2, 0.4), (1.0, 1.9), (2.5, 0.8), (PI - 0.1, 2.7)] {
        let h = schwinger_rabi(1.0, theta, omega);
        let d = floquet_decomposition(&h, 0.0, &cfg).unwrap();
        let closed = oracle::example1(&SchwingerRabiParams::new(1.0, theta, omega).unwrap()).unwrap();
        for (numeric, exact) in d.quasienergies.iter().zip(closed.quasienergies) {
            assert!((numeric - exact).abs() < 1e-8, "theta {theta} omega {omega}");
        }
    }
}
