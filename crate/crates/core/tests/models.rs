mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

use common::{fourier_model, rng, schwinger_rabi};
use floquet_qa::linalg::{hermiticity_defect, max_abs, max_abs_diff};
use floquet_qa::models::{
    build_dual, build_generic, build_two_tone, schwinger_rabi_fourier_terms, FourierTerm, SchwingerRabiParams,
    TwoToneParams,
};
use floquet_qa::spectrum::eigensystem;
use floquet_qa::{CMatrix, Complex64, Error, IntegratorConfig, PeriodicHamiltonian};
use proptest::prelude::*;
use rand::Rng;

fn assert_periodic_hermitian(h: &PeriodicHamiltonian, seed: u64) {
    let mut r = rng(seed);
    for _ in 0..256 {
        let t = r.gen_range(0.0..10.0 * h.period());
        let m = h.evaluate(t);
        let scale = 1.0 + max_abs(&m);
        assert!(hermiticity_defect(&m) <= 1e-12 * scale, "{} not Hermitian at {t}", h.label());
        let shifted = h.evaluate(t + h.period());
        assert!(max_abs_diff(&m, &shifted) <= 1e-12 * scale * (1.0 + t / h.period()), "{} at {t}", h.label());
    }
}

fn assert_derivative_matches(h: &PeriodicHamiltonian, seed: u64) {
    let mut r = rng(seed);
    for _ in 0..32 {
        let t = r.gen_range(0.0..h.period());
        let exact = h.derivative(t).expect("analytic derivative");
        let fd = h.finite_difference(t, h.period() * 1e-6);
        assert!(max_abs_diff(&exact, &fd) <= 1e-6 * (1.0 + max_abs(&exact)), "{} at {t}", h.label());
    }
}

#[test]
fn driven_two_level_entries() {
    let h = schwinger_rabi(1.0, FRAC_PI_3, 2.0).evaluate(PI / 4.0);
    assert!((h[(0, 0)].re - 0.25).abs() < 1e-15);
    assert!((h[(1, 1)].re + 0.25).abs() < 1e-15);
    let off = 0.5 * FRAC_PI_3.sin();
    assert!((h[(0, 1)] - Complex64::new(0.0, -off)).norm() < 1e-15);
    assert!((h[(1, 0)] - Complex64::new(0.0, off)).norm() < 1e-15);
    let flat = schwinger_rabi(1.0, 0.0, 1.0).evaluate(1.234);
    assert_eq!(flat, CMatrix::from_diagonal(&diag2(0.5, -0.5)));
    let tilted = schwinger_rabi(1.0, FRAC_PI_2, 1.0).evaluate(0.0);
    assert!((tilted[(0, 1)].re - 0.5).abs() < 1e-15 && tilted[(0, 0)].norm() < 1e-16);
}

fn diag2(a: f64, b: f64) -> floquet_qa::CVector {
    floquet_qa::CVector::from_vec(vec![Complex64::from(a), Complex64::from(b)])
}

#[test]
fn two_tone_values_and_periods() {
    let p = TwoToneParams { omega0: 1.0, v: 0.05, v_prime: 0.0, omega: 1.0, n_tone: 3 };
    let full = build_two_tone(p, false).unwrap();
    assert!((full.period() - 6.0 * PI).abs() < 1e-14);
    let h0 = full.evaluate(0.0);
    assert_eq!(h0[(0, 0)].re, -0.5);
    assert_eq!(h0[(0, 1)].re, -0.05);
    let truncated = build_two_tone(p, true).unwrap();
    assert!((truncated.period() - TAU).abs() < 1e-14);
    let quarter = truncated.evaluate(FRAC_PI_2);
    assert!(quarter[(0, 1)].norm() < 1e-17);
    assert_eq!(quarter[(1, 1)].re, 0.5);
}

#[test]
fn bad_parameters_are_rejected() {
    for (omega0, theta, omega) in [(1.0, PI, 1.0), (1.0, -0.1, 1.0), (0.0, 0.3, 1.0), (1.0, 0.3, -1.0)] {
        assert!(matches!(SchwingerRabiParams::new(omega0, theta, omega), Err(Error::InvalidParameter(_))));
    }
    let p = TwoToneParams { omega0: 1.0, v: 0.0, v_prime: 0.0, omega: 1.0, n_tone: 3 };
    assert!(matches!(build_two_tone(p, false), Err(Error::InvalidParameter(_))));
    let mut skew = CMatrix::zeros(2, 2);
    skew[(0, 1)] = Complex64::from(1.0);
    let terms = vec![FourierTerm { harmonic: 1, cos: skew, sin: CMatrix::zeros(2, 2) }];
    assert!(matches!(build_generic(2, 1.0, terms), Err(Error::InvalidParameter(_))));
}

#[test]
fn constant_generic_model_accepts_any_period() {
    let a0 = CMatrix::from_diagonal(&diag2(0.5, -0.5));
    for period in [0.01, 1.0, 1e3] {
        let terms = vec![FourierTerm { harmonic: 0, cos: a0.clone(), sin: CMatrix::zeros(2, 2) }];
        let h = build_generic(2, period, terms).unwrap();
        assert_eq!(h.evaluate(0.37 * period), a0);
    }
}

#[test]
fn fourier_form_reproduces_the_driven_model() {
    let p = SchwingerRabiParams::new(1.3, 0.7, 0.9).unwrap();
    let direct = schwinger_rabi(1.3, 0.7, 0.9);
    let series = build_generic(2, direct.period(), schwinger_rabi_fourier_terms(&p)).unwrap();
    let mut r = rng(11);
    for _ in 0..100 {
        let t = r.gen_range(-20.0..20.0);
        assert!(max_abs_diff(&direct.evaluate(t), &series.evaluate(t)) < 1e-14);
    }
}

#[test]
fn built_models_are_periodic_and_hermitian() {
    assert_periodic_hermitian(&schwinger_rabi(1.0, 0.4, 1.7), 1);
    let p = TwoToneParams { omega0: 1.0, v: 0.05, v_prime: 0.004, omega: 1.0, n_tone: 5 };
    assert_periodic_hermitian(&build_two_tone(p, false).unwrap(), 2);
    assert_periodic_hermitian(&build_two_tone(p, true).unwrap(), 3);
    assert_periodic_hermitian(&fourier_model(&mut rng(4), 3, 2.5, 0.3), 5);
}

#[test]
fn analytic_derivatives_match_central_differences() {
    assert_derivative_matches(&schwinger_rabi(1.0, 0.4, 1.7), 6);
    let p = TwoToneParams { omega0: 1.0, v: 0.05, v_prime: 0.004, omega: 1.0, n_tone: 5 };
    assert_derivative_matches(&build_two_tone(p, false).unwrap(), 7);
    assert_derivative_matches(&fourier_model(&mut rng(8), 4, 1.5, 0.4), 9);
    let dual = build_dual(&schwinger_rabi(1.0, 0.8, 0.6), &IntegratorConfig::default()).unwrap();
    assert_derivative_matches(&dual, 10);
}

#[test]
fn dual_of_commuting_model_is_sign_flipped() {
    let dual = build_dual(&schwinger_rabi(1.0, 0.0, 1.5), &IntegratorConfig::default()).unwrap();
    for t in [0.0, 0.3, 2.0, 7.5] {
        let m = dual.evaluate(t);
        assert!(max_abs_diff(&m, &CMatrix::from_diagonal(&diag2(-0.5, 0.5))) < 1e-10);
    }
}

#[test]
fn dual_model_is_periodic_with_rabi_period() {
    let dual = build_dual(&schwinger_rabi(1.0, FRAC_PI_3, 1.0), &IntegratorConfig::default()).unwrap();
    assert!((dual.period() - TAU).abs() < 1e-12);
    for k in 0..64 {
        let t = k as f64 * dual.period() / 64.0;
        assert!(max_abs_diff(&dual.evaluate(t + dual.period()), &dual.evaluate(t)) < 1e-8, "t = {t}");
    }
}

#[test]
fn dual_rejects_vanishing_rabi_frequency() {
    assert!(matches!(
        build_dual(&schwinger_rabi(1.0, 0.0, 1.0), &IntegratorConfig::default()),
        Err(Error::InvalidParameter(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dual_spectrum_is_the_negated_base_spectrum(
        theta in 0.0..3.1f64,
        omega in 0.2..3.0f64,
        omega0 in 0.5..2.0f64,
        t in 0.0..40.0f64,
    ) {
        let base = schwinger_rabi(omega0, theta, omega);
        prop_assume!(SchwingerRabiParams::new(omega0, theta, omega).unwrap().rabi_frequency() > 1e-3);
        let dual = build_dual(&base, &IntegratorConfig::with_steps(512)).unwrap();
        let dual_levels = eigensystem(&dual, t).unwrap().energies;
        let base_levels = eigensystem(&base, t).unwrap().energies;
        for (d, b) in dual_levels.iter().zip(base_levels.iter().rev()) {
            prop_assert!((d + b).abs() < 1e-8);
        }
        prop_assert!((dual_levels[0] + omega0 / 2.0).abs() < 1e-8);
    }

    #[test]
    fn driven_model_is_periodic_for_any_parameters(
        theta in 0.0..PI - 1e-3,
        omega in 0.05..5.0f64,
        t in -50.0..50.0f64,
    ) {
        let h = schwinger_rabi(1.0, theta, omega);
        prop_assert!(hermiticity_defect(&h.evaluate(t)) < 1e-15);
        prop_assert!(max_abs_diff(&h.evaluate(t), &h.evaluate(t + h.period())) < 1e-12 * (1.0 + t.abs()));
    }
}
