//! Adiabaticity criteria, the overlap bounds behind them, and direct
//! measurement of the evolved overlaps they bound.
//!
//! "A ≪ B" is operationalized as `A/B ≤ δ_T` with a configurable
//! [`Threshold`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::floquet::{self, FloquetDecomposition, DEGENERACY_TOL};
use crate::linalg::{self, CMatrix};
use crate::models::PeriodicHamiltonian;
use crate::propagator::{self, IntegratorConfig};
use crate::spectrum::{self, CouplingProfile, DEFAULT_PROFILE_SAMPLES};

/// Cut-off `δ_T` for the ratio form of a "much less than" condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub delta_t: f64,
}

impl Default for Threshold {
    fn default() -> Self {
        Self { delta_t: 0.05 }
    }
}

impl Threshold {
    pub fn new(delta_t: f64) -> Result<Self> {
        if !(delta_t > 0.0 && delta_t < 1.0) {
            return Err(Error::invalid(format!("threshold must lie in (0, 1), got {delta_t}")));
        }
        Ok(Self { delta_t })
    }

    pub fn passes(&self, ratio: f64) -> bool {
        ratio <= self.delta_t
    }
}

/// `max|⟨E_m|Ė_n⟩| / min|E_m − E_n|`.
pub fn traditional_condition(profile: &CouplingProfile) -> Result<f64> {
    if profile.min_gap <= 0.0 {
        return Err(Error::DegenerateSpectrum { t: profile.t0, gap: profile.min_gap });
    }
    Ok(profile.max_coupling / profile.min_gap)
}

/// `ω / min|E_m − E_n|`, with `ω` the angular frequency of the Hamiltonian.
pub fn frequency_condition(omega: f64, profile: &CouplingProfile) -> Result<f64> {
    if profile.min_gap <= 0.0 {
        return Err(Error::DegenerateSpectrum { t: profile.t0, gap: profile.min_gap });
    }
    Ok(omega / profile.min_gap)
}

/// Floquet criterion for one Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetCondition {
    /// `max|⟨E_m|Ė_n⟩|` divided by `ω/(π√(2(N−1))) · min|sin((ε_i−ε_j)T/2)|`.
    pub ratio: f64,
    /// `sin²(√(N−1)·T·max|⟨E_m|Ė_n⟩|/2) / min sin²((ε_i−ε_j)T/2)`.
    pub delta: f64,
    pub gap_factor: f64,
    /// `√(N−1)·T·max|⟨E_m|Ė_n⟩|`.
    pub arc: f64,
    /// The arc exceeds π/2, outside the range where the one-period
    /// finite-time estimate is informative.
    pub domain_violation: bool,
}

pub fn floquet_condition(
    profile: &CouplingProfile,
    decomp: &FloquetDecomposition,
    dimension: usize,
) -> Result<FloquetCondition> {
    floquet_condition_with_tol(profile, decomp, dimension, DEGENERACY_TOL)
}

/// [`floquet_condition`] with an explicit degeneracy tolerance on the gap
/// factor. A Hamiltonian with vanishing coupling is trivially adiabatic and
/// yields ratio and δ of zero even at a quasienergy degeneracy.
pub fn floquet_condition_with_tol(
    profile: &CouplingProfile,
    decomp: &FloquetDecomposition,
    dimension: usize,
    degeneracy_tol: f64,
) -> Result<FloquetCondition> {
    if dimension < 2 {
        return Err(Error::invalid("the Floquet condition needs at least two levels"));
    }
    let period = decomp.period;
    let levels = (dimension - 1) as f64;
    let arc = libm::sqrt(levels) * period * profile.max_coupling;
    let domain_violation = arc > FRAC_PI_2;
    if profile.max_coupling == 0.0 {
        let gap_factor = floquet::raw_gap_factor(&decomp.quasienergies, period);
        return Ok(FloquetCondition { ratio: 0.0, delta: 0.0, gap_factor, arc, domain_violation });
    }
    let gap_factor = floquet::gap_factor_with_tol(decomp, period, degeneracy_tol)?;
    let rhs = decomp.omega / (PI * libm::sqrt(2.0 * levels)) * gap_factor;
    let s = libm::sin(arc / 2.0);
    Ok(FloquetCondition {
        ratio: profile.max_coupling / rhs,
        delta: s * s / (gap_factor * gap_factor),
        gap_factor,
        arc,
        domain_violation,
    })
}

/// Lower bound `√(1 − 4δ)` on the overlap modulus, zero once `δ ≥ 1/4`.
pub fn overlap_lower_bound(delta: f64) -> f64 {
    if delta < 0.25 {
        libm::sqrt(1.0 - 4.0 * delta)
    } else {
        0.0
    }
}

/// Finite-time criterion over an evolution time `τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteTimeCondition {
    /// `τ·√(N−1)·max|⟨E_m|Ė_n⟩| / √2`.
    pub ratio: f64,
    /// Upper bound `2 sin²(√(N−1)·τ·max|⟨E_m|Ė_n⟩|/2)` on `1 − |d_m(t₀+τ)|`.
    pub bound: f64,
    pub arc: f64,
    pub domain_violation: bool,
}

pub fn finite_time_condition(profile: &CouplingProfile, dimension: usize, tau: f64) -> Result<FiniteTimeCondition> {
    finite_time_from_coupling(profile.max_coupling, dimension, tau)
}

/// [`finite_time_condition`] for an explicit coupling maximum.
pub fn finite_time_from_coupling(max_coupling: f64, dimension: usize, tau: f64) -> Result<FiniteTimeCondition> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!("tau must be positive, got {tau}")));
    }
    if dimension < 2 {
        return Err(Error::invalid("the finite-time condition needs at least two levels"));
    }
    let arc = libm::sqrt((dimension - 1) as f64) * tau * max_coupling;
    let s = libm::sin(arc / 2.0);
    Ok(FiniteTimeCondition { ratio: arc / SQRT_2, bound: 2.0 * s * s, arc, domain_violation: arc > FRAC_PI_2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdicts {
    pub traditional: bool,
    pub frequency: bool,
    pub floquet: bool,
}

/// All criteria for one Hamiltonian.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub label: String,
    pub dimension: usize,
    pub period: f64,
    pub omega: f64,
    pub t0: f64,
    pub quasienergies: Vec<f64>,
    pub max_coupling: f64,
    pub min_gap: f64,
    pub max_gap: f64,
    /// Grid spacing of the coupling profile.
    pub profile_resolution: f64,
    pub traditional_ratio: f64,
    pub frequency_ratio: f64,
    /// `None` at a quasienergy degeneracy.
    pub floquet_ratio: Option<f64>,
    pub delta: Option<f64>,
    pub gap_factor: f64,
    pub arc: f64,
    pub domain_violation: bool,
    pub degenerate_quasienergies: bool,
    /// `√(1 − 4δ)`, or zero when the bound is vacuous or undefined.
    pub bound_overlap: f64,
    pub threshold: Threshold,
    pub verdicts: Verdicts,
}

impl ConditionReport {
    /// Finite-time ratio for an evolution time `tau`.
    pub fn finite_time_ratio(&self, tau: f64) -> f64 {
        libm::sqrt((self.dimension - 1) as f64) * tau * self.max_coupling / SQRT_2
    }

    /// Finite-time bound `2 sin²(√(N−1)·τ·max|⟨E_m|Ė_n⟩|/2)`.
    pub fn finite_time_bound(&self, tau: f64) -> f64 {
        let s = libm::sin(libm::sqrt((self.dimension - 1) as f64) * tau * self.max_coupling / 2.0);
        2.0 * s * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    pub integrator: IntegratorConfig,
    pub threshold: Threshold,
    pub profile_samples: usize,
    /// Gap factors below this value mark the quasienergies as degenerate.
    pub degeneracy_tol: f64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::default(),
            threshold: Threshold::default(),
            profile_samples: DEFAULT_PROFILE_SAMPLES,
            degeneracy_tol: DEGENERACY_TOL,
        }
    }
}

/// Runs monodromy, Floquet decomposition, coupling profile and every
/// criterion for `h`, starting at `t0`.
pub fn analyze(
    h: &PeriodicHamiltonian,
    t0: f64,
    cfg: &IntegratorConfig,
    threshold: Threshold,
) -> Result<ConditionReport> {
    analyze_with(h, t0, &AnalysisOptions { integrator: *cfg, threshold, ..AnalysisOptions::default() })
}

pub fn analyze_with(h: &PeriodicHamiltonian, t0: f64, opts: &AnalysisOptions) -> Result<ConditionReport> {
    if h.dimension() < 2 {
        return Err(Error::invalid("analysis needs at least two levels"));
    }
    let decomp = floquet::floquet_decomposition(h, t0, &opts.integrator)?;
    let profile = spectrum::coupling_profile(h, t0, opts.profile_samples)?;
    let traditional_ratio = traditional_condition(&profile)?;
    let frequency_ratio = frequency_condition(h.omega(), &profile)?;
    let floquet = match floquet_condition_with_tol(&profile, &decomp, h.dimension(), opts.degeneracy_tol) {
        Ok(f) => Some(f),
        Err(Error::DegenerateQuasienergies { .. }) => None,
        Err(e) => return Err(e),
    };
    let thr = opts.threshold;
    let arc = libm::sqrt((h.dimension() - 1) as f64) * h.period() * profile.max_coupling;
    Ok(ConditionReport {
        label: h.label().into(),
        dimension: h.dimension(),
        period: h.period(),
        omega: h.omega(),
        t0,
        quasienergies: decomp.quasienergies.clone(),
        max_coupling: profile.max_coupling,
        min_gap: profile.min_gap,
        max_gap: profile.max_gap,
        profile_resolution: profile.resolution,
        traditional_ratio,
        frequency_ratio,
        floquet_ratio: floquet.map(|f| f.ratio),
        delta: floquet.map(|f| f.delta),
        gap_factor: floquet
            .map(|f| f.gap_factor)
            .unwrap_or_else(|| floquet::raw_gap_factor(&decomp.quasienergies, decomp.period)),
        arc,
        domain_violation: arc > FRAC_PI_2,
        degenerate_quasienergies: floquet.is_none(),
        bound_overlap: floquet.map_or(0.0, |f| overlap_lower_bound(f.delta)),
        threshold: thr,
        verdicts: Verdicts {
            traditional: thr.passes(traditional_ratio),
            frequency: thr.passes(frequency_ratio),
            floquet: floquet.is_some_and(|f| thr.passes(f.ratio)),
        },
    })
}

/// Overlaps `|d_m(t)| = |⟨E_m(t)|U(t,t₀)|E_m(t₀)⟩|` of every level `m`,
/// recorded every `stride` integrator steps (and always at the end).
#[derive(Debug, Clone)]
pub struct OverlapTrace {
    pub times: Vec<f64>,
    /// `overlaps[k][m]` is `|d_m(times[k])|`.
    pub overlaps: Vec<Vec<f64>>,
    /// Per-level minimum over every integrator step, not only the recorded ones.
    pub minima: Vec<f64>,
}

pub fn overlap_trace(
    h: &PeriodicHamiltonian,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    stride: usize,
) -> Result<OverlapTrace> {
    let stride = stride.max(1);
    let n = h.dimension();
    let initial = spectrum::eigensystem(h, t0)?.basis();
    let total = propagator::step_count(h, t0, t1, cfg);
    let mut trace = OverlapTrace { times: Vec::new(), overlaps: Vec::new(), minima: alloc::vec![1.0; n] };
    let mut failure = None;
    let mut index = 0usize;
    propagator::propagate_observed(h, t0, t1, cfg, |t, u: &CMatrix| {
        let keep = index.is_multiple_of(stride) || index == total;
        index += 1;
        if failure.is_some() {
            return;
        }
        match spectrum::eigensystem(h, t) {
            Ok(spec) => {
                let evolved = u * &initial;
                let row: Vec<f64> =
                    (0..n).map(|m| linalg::inner(&spec.states[m], &evolved.column(m).into_owned()).norm()).collect();
                for (lo, &d) in trace.minima.iter_mut().zip(&row) {
                    *lo = lo.min(d);
                }
                if keep {
                    trace.times.push(t);
                    trace.overlaps.push(row);
                }
            }
            Err(e) => failure = Some(e),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(trace),
    }
}

/// Per-level minimum of `|d_m(t)|` over `[t0, t1]` at integrator resolution.
pub fn min_overlaps(h: &PeriodicHamiltonian, t0: f64, t1: f64, cfg: &IntegratorConfig) -> Result<Vec<f64>> {
    overlap_trace(h, t0, t1, cfg, usize::MAX).map(|trace| trace.minima)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_bound_values() {
        assert_eq!(overlap_lower_bound(0.0), 1.0);
        assert!((overlap_lower_bound(0.05) - libm::sqrt(0.8)).abs() < 1e-15);
        assert_eq!(overlap_lower_bound(0.3), 0.0);
        assert_eq!(overlap_lower_bound(0.25), 0.0);
    }

    #[test]
    fn threshold_validation() {
        assert!(Threshold::new(0.0).is_err());
        assert!(Threshold::new(1.0).is_err());
        assert!(Threshold::new(0.05).unwrap().passes(0.05));
        assert!(!Threshold::default().passes(0.0500001));
    }

    #[test]
    fn finite_time_limits() {
        let c = finite_time_from_coupling(0.5 * libm::sin(0.1), 2, 1.0).unwrap();
        assert!((c.ratio - 0.035_300).abs() < 1e-5, "{}", c.ratio);
        assert!((c.bound - 0.001_246).abs() < 1e-6, "{}", c.bound);
        let tiny = finite_time_from_coupling(0.3, 3, 1e-300).unwrap();
        assert!(tiny.ratio < 1e-299);
        assert!(finite_time_from_coupling(0.3, 2, 0.0).is_err());
    }
}
