//! Instantaneous eigensystems, inter-level couplings and adiabatic phases.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::models::PeriodicHamiltonian;
use crate::propagator::{self, IntegratorConfig};

/// Default number of samples per period for coupling maxima.
pub const DEFAULT_PROFILE_SAMPLES: usize = 2048;
/// Minimum number of samples accepted by [`coupling_profile`].
pub const MIN_PROFILE_SAMPLES: usize = 64;
/// Relative level-spacing threshold (in units of the spectral radius).
pub const DEGENERACY_REL_TOL: f64 = 1e-10;

/// Eigenvalues `E_n(t)` in ascending order and eigenvectors `|E_n(t)⟩` in the
/// deterministic gauge (largest component real and positive).
#[derive(Debug, Clone)]
pub struct InstantaneousSpectrum {
    pub t: f64,
    pub energies: Vec<f64>,
    pub states: Vec<CVector>,
}

impl InstantaneousSpectrum {
    /// Smallest spacing between any two levels.
    pub fn min_gap(&self) -> f64 {
        self.energies.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Matrix whose columns are the eigenvectors.
    /// `max_{m≠n} |⟨E_m|D|E_n⟩| / |E_n − E_m|` for a derivative `D`, in the
    /// stored eigenbasis. Assumes a non-degenerate spectrum.
    pub fn max_coupling(&self, dh: &CMatrix) -> f64 {
        let n = self.energies.len();
        let mut largest: f64 = 0.0;
        for col in 0..n {
            let image = dh * &self.states[col];
            for row in 0..n {
                if row != col {
                    let element = linalg::inner(&self.states[row], &image).norm();
                    largest = largest.max(element / (self.energies[col] - self.energies[row]).abs());
                }
            }
        }
        largest
    }

    pub fn basis(&self) -> CMatrix {
        CMatrix::from_columns(&self.states)
    }

    fn degeneracy_threshold(&self) -> f64 {
        let radius = self.energies.iter().fold(0.0, |acc: f64, e| acc.max(e.abs()));
        DEGENERACY_REL_TOL * radius
    }
}

/// Coupling and level spacing sampled over one period.
#[derive(Debug, Clone)]
pub struct CouplingProfile {
    pub t0: f64,
    pub period: f64,
    pub grid: Vec<f64>,
    /// `max_{m≠n} |⟨E_m|Ė_n⟩|` at each grid point.
    pub coupling_values: Vec<f64>,
    /// Smallest level spacing at each grid point.
    pub gaps: Vec<f64>,
    pub max_coupling: f64,
    pub min_gap: f64,
    pub max_gap: f64,
    /// Grid spacing; the maxima are resolved to this step.
    pub resolution: f64,
}

pub fn eigensystem(h: &PeriodicHamiltonian, t: f64) -> Result<InstantaneousSpectrum> {
    spectrum_of(&h.evaluate(t), t)
}

pub(crate) fn spectrum_of(m: &CMatrix, t: f64) -> Result<InstantaneousSpectrum> {
    let eig = linalg::eigh(m)?;
    let states = (0..eig.values.len())
        .map(|k| {
            let mut v = eig.vectors.column(k).into_owned();
            linalg::fix_gauge(&mut v);
            v
        })
        .collect();
    Ok(InstantaneousSpectrum { t, energies: eig.values, states })
}

/// `max_{m≠n} |⟨E_m|Ė_n⟩|` at time `t`, from the identity
/// `⟨E_m|Ė_n⟩ = ⟨E_m|dH/dt|E_n⟩ / (E_n − E_m)`.
pub fn coupling(h: &PeriodicHamiltonian, t: f64) -> Result<f64> {
    coupling_and_gap(h, t, &h.derivative_or_fd(t)).map(|(c, _)| c)
}

/// [`coupling`] with `dH/dt` replaced by a central difference of step `step`.
pub fn coupling_finite_difference(h: &PeriodicHamiltonian, t: f64, step: f64) -> Result<f64> {
    coupling_and_gap(h, t, &h.finite_difference(t, step)).map(|(c, _)| c)
}

fn coupling_and_gap(h: &PeriodicHamiltonian, t: f64, dh: &CMatrix) -> Result<(f64, f64)> {
    let spec = eigensystem(h, t)?;
    let gap = spec.min_gap();
    if gap <= spec.degeneracy_threshold() {
        return Err(Error::DegenerateSpectrum { t, gap });
    }
    Ok((spec.max_coupling(dh), gap))
}

/// Coupling maximum, gap minimum and gap maximum over `M` equally spaced
/// samples of `[t0, t0 + T)`.
pub fn coupling_profile(h: &PeriodicHamiltonian, t0: f64, samples: usize) -> Result<CouplingProfile> {
    if samples < MIN_PROFILE_SAMPLES {
        return Err(Error::invalid(format!(
            "coupling profile needs at least {MIN_PROFILE_SAMPLES} samples, got {samples}"
        )));
    }
    let period = h.period();
    let resolution = period / samples as f64;
    let mut grid = Vec::with_capacity(samples);
    let mut coupling_values = Vec::with_capacity(samples);
    let mut gaps = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = t0 + k as f64 * resolution;
        let (c, g) = coupling_and_gap(h, t, &h.derivative_or_fd(t))?;
        grid.push(t);
        coupling_values.push(c);
        gaps.push(g);
    }
    let max_coupling = coupling_values.iter().copied().fold(0.0, f64::max);
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    Ok(CouplingProfile { t0, period, grid, coupling_values, gaps, max_coupling, min_gap, max_gap, resolution })
}

/// Coupling maximum over `samples + 1` equally spaced points of `[t0, t1]`.
pub fn coupling_max_over(h: &PeriodicHamiltonian, t0: f64, t1: f64, samples: usize) -> Result<f64> {
    if t1 < t0 || samples == 0 {
        return Err(Error::invalid("coupling_max_over needs t1 >= t0 and samples > 0"));
    }
    let dt = (t1 - t0) / samples as f64;
    (0..=samples).try_fold(0.0, |acc: f64, k| Ok(acc.max(coupling(h, t0 + k as f64 * dt)?)))
}

/// Dynamical phase `−∫E_n ds` and geometric phase `i∫⟨E_n|Ė_n⟩ds` of level
/// `n` along `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticPhases {
    pub dynamical: f64,
    /// Reduced to `(−π, π]`. Uses a gauge that coincides with the
    /// deterministic eigenvector gauge at both end points, so for a closed
    /// loop it is the Berry phase.
    pub geometric: f64,
}

/// Adiabatic phases of level `n`, integrated on the propagation grid of `cfg`.
///
/// The dynamical phase uses composite Simpson quadrature. The geometric phase
/// is accumulated by phase continuation: each eigenvector is aligned with its
/// predecessor (a discrete parallel transport in which `⟨E_n|Ė_n⟩` vanishes),
/// and the phase mismatch against the deterministic gauge at `t1` is the
/// integral of `i⟨E_n|Ė_n⟩` in that gauge.
pub fn phases(h: &PeriodicHamiltonian, n: usize, t0: f64, t1: f64, cfg: &IntegratorConfig) -> Result<AdiabaticPhases> {
    cfg.validate()?;
    if n >= h.dimension() {
        return Err(Error::invalid(format!("level {n} out of range for dimension {}", h.dimension())));
    }
    if t1 < t0 {
        return Err(Error::invalid("phases require t1 >= t0"));
    }
    let mut steps = propagator::step_count(h, t0, t1, cfg).max(2);
    steps += steps % 2;
    let dt = (t1 - t0) / steps as f64;

    let level = |t: f64| -> Result<(f64, CVector)> {
        let spec = eigensystem(h, t)?;
        let gap = spec.min_gap();
        if gap <= spec.degeneracy_threshold() {
            return Err(Error::DegenerateSpectrum { t, gap });
        }
        Ok((spec.energies[n], spec.states[n].clone()))
    };

    let (e0, v0) = level(t0)?;
    let mut simpson = e0;
    let mut transported = v0;
    let mut last = None;
    for k in 1..=steps {
        let t = if k == steps { t1 } else { t0 + k as f64 * dt };
        let (e, v) = level(t)?;
        simpson += e * if k == steps {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let overlap = linalg::inner(&transported, &v);
        if overlap.norm() < 0.5 {
            return Err(Error::NumericalFailure(format!(
                "eigenvector of level {n} jumps between samples near t = {t}; refine the grid"
            )));
        }
        transported = v.clone() * (overlap.conj() / overlap.norm());
        last = Some(v);
    }
    let geometric = match last {
        Some(v) => -linalg::inner(&transported, &v).arg(),
        None => 0.0,
    };
    Ok(AdiabaticPhases { dynamical: -simpson * dt / 3.0, geometric: wrap_phase(geometric) })
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let shifted = x - TAU * libm::ceil((x - PI) / TAU);
    if shifted <= -PI {
        shifted + TAU
    } else {
        shifted
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_schwinger_rabi, build_two_tone, SchwingerRabiParams, TwoToneParams};
    use num_complex::Complex64;

    fn sr(omega0: f64, theta: f64, omega: f64) -> PeriodicHamiltonian {
        build_schwinger_rabi(SchwingerRabiParams { omega0, theta, omega }).unwrap()
    }

    #[test]
    fn driven_model_energies_and_gauge() {
        for (th, w, t) in [(0.3, 1.0, 0.2), (2.0, 0.4, 5.0), (PI / 2.0, 3.0, -1.0)] {
            let s = eigensystem(&sr(1.7, th, w), t).unwrap();
            assert!((s.energies[0] + 0.85).abs() < 1e-14);
            assert!((s.energies[1] - 0.85).abs() < 1e-14);
        }
        let s = eigensystem(&sr(1.0, PI / 2.0, 1.0), 0.0).unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((s.states[0][0] - Complex64::from(r)).norm() < 1e-14);
        assert!((s.states[0][1] - Complex64::from(-r)).norm() < 1e-14);
    }

    #[test]
    fn coupling_reference_values() {
        for k in 0..10 {
            let t = 0.77 * k as f64;
            let c = coupling(&sr(1.0, 0.1, 1.0), t).unwrap();
            assert!((c - 0.5 * libm::sin(0.1)).abs() < 1e-14);
            assert_eq!(coupling(&sr(1.0, 0.0, 1.0), t).unwrap(), 0.0);
        }
    }

    #[test]
    fn finite_difference_path_agrees_on_two_tone() {
        let p = TwoToneParams { omega0: 1.0, v: 0.05, v_prime: 0.004, omega: 1.0, n_tone: 3 };
        let h = build_two_tone(p, false).unwrap();
        for k in 0..25 {
            let t = 0.71 * k as f64;
            let analytic = coupling(&h, t).unwrap();
            let fd = coupling_finite_difference(&h, t, h.period() * 1e-6).unwrap();
            assert!((analytic - fd).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn degenerate_spectrum_is_reported() {
        let zero = crate::models::build_generic(2, 1.0, alloc::vec![]).unwrap();
        assert!(matches!(coupling(&zero, 0.3), Err(Error::DegenerateSpectrum { .. })));
    }

    #[test]
    fn profile_requires_enough_samples() {
        assert!(matches!(coupling_profile(&sr(1.0, 0.1, 1.0), 0.0, 63), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn truncated_two_tone_gap_range() {
        let p = TwoToneParams { omega0: 1.0, v: 0.05, v_prime: 0.0, omega: 1.0, n_tone: 1 };
        let prof = coupling_profile(&build_two_tone(p, true).unwrap(), 0.0, 2048).unwrap();
        assert!((prof.min_gap - 1.0).abs() < 1e-12);
        assert!((prof.max_gap - libm::sqrt(1.01)).abs() < 1e-12);
    }

    #[test]
    fn constant_model_phases() {
        let h = sr(1.0, 0.0, 1.0);
        let ph = phases(&h, 0, 0.0, 3.0, &IntegratorConfig::with_steps(64)).unwrap();
        assert!((ph.dynamical - 1.5).abs() < 1e-12);
        assert!(ph.geometric.abs() < 1e-12);
    }

    #[test]
    fn wrap_phase_range() {
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(0.25) - 0.25).abs() < 1e-15);
        assert!((wrap_phase(-7.0) - (-7.0 + TAU)).abs() < 1e-12);
    }
}
