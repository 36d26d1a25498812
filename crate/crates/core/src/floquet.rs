//! Quasienergies and Floquet modes of a periodic Hamiltonian.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, cis, CVector};
use crate::models::PeriodicHamiltonian;
use crate::propagator::{self, IntegratorConfig, UnitaryPropagator};

/// Default gap-factor threshold below which quasienergies count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Quasienergies (ascending, first Brillouin zone `(−ω/2, ω/2]`) and the
/// matching Floquet modes `|φ_i(t₀)⟩`.
#[derive(Debug, Clone)]
pub struct FloquetDecomposition {
    pub quasienergies: Vec<f64>,
    pub modes_t0: Vec<CVector>,
    pub t0: f64,
    pub omega: f64,
    pub period: f64,
}

/// Amplitudes `a_i = ⟨φ_i(t)|ψ⟩` of a state in the Floquet basis and the
/// weights `c_i = |a_i|²`.
#[derive(Debug, Clone)]
pub struct FloquetExpansion {
    pub amplitudes: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl FloquetExpansion {
    /// `Σ_{i<j} c_i c_j`.
    pub fn pair_weight_sum(&self) -> f64 {
        pair_weight_sum(&self.weights)
    }
}

/// Maps a quasienergy into `(−ω/2, ω/2]`. Values within `1e-9·ω` of the
/// lower edge are sent to the upper edge.
pub fn fold_quasienergy(eps: f64, omega: f64) -> f64 {
    let shift = libm::ceil((eps - 0.5 * omega) / omega);
    let mut folded = eps - shift * omega;
    if folded <= -0.5 * omega + 1e-9 * omega {
        folded += omega;
    }
    folded
}

/// Quasienergies and modes from a one-period propagator.
pub fn decompose(monodromy: &UnitaryPropagator, omega: f64) -> Result<FloquetDecomposition> {
    let period = monodromy.t_end - monodromy.t_start;
    if !(omega.is_finite() && omega > 0.0) || (period * omega - TAU).abs() > 1e-9 * TAU {
        return Err(Error::invalid(format!("propagator spans {period}, which is not one period of omega = {omega}")));
    }
    let (values, vectors) = linalg::unitary_eig(&monodromy.matrix)?;
    let mut pairs = Vec::with_capacity(values.len());
    for (k, lambda) in values.iter().enumerate() {
        let modulus_error = (lambda.norm() - 1.0).abs();
        if modulus_error > 1e-8 {
            return Err(Error::NumericalFailure(format!(
                "monodromy eigenvalue {lambda} is off the unit circle by {modulus_error:e}"
            )));
        }
        let eps = fold_quasienergy(-lambda.arg() / period, omega);
        let mut mode = vectors.column(k).into_owned();
        linalg::fix_gauge(&mut mode);
        pairs.push((eps, mode));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (quasienergies, modes_t0) = pairs.into_iter().unzip();
    Ok(FloquetDecomposition { quasienergies, modes_t0, t0: monodromy.t_start, omega, period })
}

/// Monodromy from `t0` followed by [`decompose`].
pub fn floquet_decomposition(h: &PeriodicHamiltonian, t0: f64, cfg: &IntegratorConfig) -> Result<FloquetDecomposition> {
    let m = propagator::monodromy(h, t0, cfg)?;
    decompose(&m, h.omega())
}

/// Floquet modes at time `t ≥ t₀`:
/// `|φ_i(t)⟩ = e^{iε_i(t−t₀)} U(t, t₀)|φ_i(t₀)⟩`.
pub fn mode_at(
    decomp: &FloquetDecomposition,
    h: &PeriodicHamiltonian,
    cfg: &IntegratorConfig,
    t: f64,
) -> Result<Vec<CVector>> {
    if t == decomp.t0 {
        return Ok(decomp.modes_t0.clone());
    }
    let u = propagator::propagate(h, decomp.t0, t, cfg)?.matrix;
    let elapsed = t - decomp.t0;
    Ok(decomp.quasienergies.iter().zip(&decomp.modes_t0).map(|(&eps, mode)| (&u * mode) * cis(eps * elapsed)).collect())
}

/// Expansion coefficients of a normalized `state` in the modes at time `t`.
pub fn expand_state(
    decomp: &FloquetDecomposition,
    state: &CVector,
    h: &PeriodicHamiltonian,
    cfg: &IntegratorConfig,
    t: f64,
) -> Result<FloquetExpansion> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!("state must be normalized, norm = {norm}")));
    }
    let modes = mode_at(decomp, h, cfg, t)?;
    Ok(expand_in_modes(&modes, state))
}

/// Expansion of `state` in an explicit orthonormal mode set.
pub fn expand_in_modes(modes: &[CVector], state: &CVector) -> FloquetExpansion {
    let amplitudes: Vec<Complex64> = modes.iter().map(|m| linalg::inner(m, state)).collect();
    let raw: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|c| c / total).collect();
    FloquetExpansion { amplitudes, weights }
}

/// `min_{i≠j} |sin((ε_i − ε_j)T/2)|` without any degeneracy check.
/// Invariant under shifting any quasienergy by a multiple of `2π/T`.
pub fn raw_gap_factor(quasienergies: &[f64], period: f64) -> f64 {
    let mut smallest = f64::INFINITY;
    for (i, a) in quasienergies.iter().enumerate() {
        for b in &quasienergies[i + 1..] {
            smallest = smallest.min(libm::fabs(libm::sin((a - b) * period / 2.0)));
        }
    }
    smallest
}

/// Quasienergy gap factor with the default degeneracy tolerance.
pub fn gap_factor(decomp: &FloquetDecomposition, period: f64) -> Result<f64> {
    gap_factor_with_tol(decomp, period, DEGENERACY_TOL)
}

pub fn gap_factor_with_tol(decomp: &FloquetDecomposition, period: f64, tol: f64) -> Result<f64> {
    if decomp.quasienergies.len() < 2 {
        return Err(Error::invalid("gap factor needs at least two levels"));
    }
    let g = raw_gap_factor(&decomp.quasienergies, period);
    if g < tol {
        return Err(Error::DegenerateQuasienergies { gap_factor: g });
    }
    Ok(g)
}

/// `Σ_{i<j} c_i c_j`.
pub fn pair_weight_sum(weights: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, a) in weights.iter().enumerate() {
        for b in &weights[i + 1..] {
            total += a * b;
        }
    }
    total
}

/// Fidelity after one period predicted from the Floquet weights:
/// `1 − 4 Σ_{i<j} c_i c_j sin²((ε_i − ε_j)T/2)`.
pub fn one_period_fidelity(weights: &[f64], quasienergies: &[f64], period: f64) -> f64 {
    let mut loss = 0.0;
    for i in 0..weights.len() {
        for j in i + 1..weights.len() {
            let s = libm::sin((quasienergies[i] - quasienergies[j]) * period / 2.0);
            loss += weights[i] * weights[j] * s * s;
        }
    }
    1.0 - 4.0 * loss
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_schwinger_rabi, SchwingerRabiParams};
    use core::f64::consts::PI;

    fn sr(omega0: f64, theta: f64, omega: f64) -> PeriodicHamiltonian {
        build_schwinger_rabi(SchwingerRabiParams { omega0, theta, omega }).unwrap()
    }

    #[test]
    fn folding_convention() {
        assert_eq!(fold_quasienergy(0.5, 1.0), 0.5);
        assert_eq!(fold_quasienergy(-0.5, 1.0), 0.5);
        assert!((fold_quasienergy(0.75, 1.0) + 0.25).abs() < 1e-12);
        assert!((fold_quasienergy(-3.2, 1.0) + 0.2).abs() < 1e-12);
        assert!((fold_quasienergy(-0.5 + 1e-12, 1.0) - 0.5).abs() < 1e-11);
    }

    #[test]
    fn constant_model_sits_on_zone_edge() {
        let d = floquet_decomposition(&sr(1.0, 0.0, 1.0), 0.0, &IntegratorConfig::default()).unwrap();
        for eps in &d.quasienergies {
            assert!((eps - 0.5).abs() < 1e-9, "{eps}");
        }
        assert!(raw_gap_factor(&d.quasienergies, d.period) < 1e-9);
    }

    #[test]
    fn driven_model_quasienergies() {
        // Ω = √2 at (1, π/2, 1). The frame rotation contributes a factor −1
        // to the monodromy, so the pair sits at ±Ω/2 + ω/2 = ±(√2 − 1)/2.
        let d = floquet_decomposition(&sr(1.0, PI / 2.0, 1.0), 0.0, &IntegratorConfig::default()).unwrap();
        let edge = (core::f64::consts::SQRT_2 - 1.0) / 2.0;
        assert!((d.quasienergies[0] + edge).abs() < 1e-9);
        assert!((d.quasienergies[1] - edge).abs() < 1e-9);
        let g = gap_factor(&d, d.period).unwrap();
        assert!((g - 0.963_902_532_849_877).abs() < 1e-9, "{g}");
    }

    #[test]
    fn gap_factor_is_refolding_invariant() {
        let q = [0.3, -0.11, 0.42];
        let period = TAU / 1.7;
        let base = raw_gap_factor(&q, period);
        let shifted = [0.3 + 1.7, -0.11, 0.42 - 2.0 * 1.7];
        assert!((raw_gap_factor(&shifted, period) - base).abs() < 1e-12);
    }

    #[test]
    fn expansion_rejects_unnormalized_state() {
        let h = sr(1.0, 0.4, 1.0);
        let cfg = IntegratorConfig::with_steps(256);
        let d = floquet_decomposition(&h, 0.0, &cfg).unwrap();
        let state = CVector::from_vec(alloc::vec![Complex64::from(1.0), Complex64::from(1.0)]);
        assert!(matches!(expand_state(&d, &state, &h, &cfg, 0.0), Err(Error::InvalidParameter(_))));
        let e = expand_state(&d, &d.modes_t0[0], &h, &cfg, 0.0).unwrap();
        assert!((e.weights[0] - 1.0).abs() < 1e-12 && e.weights[1] < 1e-12);
    }

    #[test]
    fn single_level_has_no_gap_factor() {
        let d = FloquetDecomposition {
            quasienergies: alloc::vec![0.1],
            modes_t0: alloc::vec![],
            t0: 0.0,
            omega: 1.0,
            period: TAU,
        };
        assert!(matches!(gap_factor(&d, TAU), Err(Error::InvalidParameter(_))));
    }
}
