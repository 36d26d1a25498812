#![allow(dead_code)]

use floquet_qa::models::{build_generic, build_schwinger_rabi, FourierTerm, SchwingerRabiParams};
use floquet_qa::{CMatrix, CVector, Complex64, PeriodicHamiltonian};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn schwinger_rabi(omega0: f64, theta: f64, omega: f64) -> PeriodicHamiltonian {
    build_schwinger_rabi(SchwingerRabiParams::new(omega0, theta, omega).unwrap()).unwrap()
}

pub fn hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + a.adjoint()).scale(scale / 2.0)
}

/// Random Fourier model with a diagonal, well separated static part so that
/// the instantaneous spectrum stays non-degenerate.
pub fn fourier_model(rng: &mut impl Rng, n: usize, period: f64, drive: f64) -> PeriodicHamiltonian {
    let mut static_part = hermitian(rng, n, 0.05);
    for k in 0..n {
        static_part[(k, k)] += Complex64::from(k as f64 - (n as f64 - 1.0) / 2.0);
    }
    let mut terms = vec![FourierTerm { harmonic: 0, cos: static_part, sin: CMatrix::zeros(n, n) }];
    for harmonic in 1..=2 {
        terms.push(FourierTerm { harmonic, cos: hermitian(rng, n, drive), sin: hermitian(rng, n, drive) });
    }
    build_generic(n, period, terms).unwrap()
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let norm = v.norm();
    v.unscale(norm)
}
