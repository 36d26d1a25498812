//! Periodic Hamiltonians: the driven two-level model, its dual, the two-tone
//! model and a generic real-Fourier family.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, cis, CMatrix};
use crate::propagator::{self, IntegratorConfig};

/// Hermiticity tolerance applied to user-supplied coefficient matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Level splitting `omega0`, mixing angle `theta` and drive frequency `omega`
/// of the rotating-field two-level model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchwingerRabiParams {
    pub omega0: f64,
    pub theta: f64,
    pub omega: f64,
}

impl SchwingerRabiParams {
    pub fn new(omega0: f64, theta: f64, omega: f64) -> Result<Self> {
        let p = Self { omega0, theta, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::invalid(format!("omega0 must be positive, got {}", self.omega0)));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::invalid(format!("omega must be positive, got {}", self.omega)));
        }
        if !(0.0..PI).contains(&self.theta) {
            return Err(Error::invalid(format!("theta must lie in [0, pi), got {}", self.theta)));
        }
        Ok(())
    }

    /// Rabi frequency in the rotating frame, `sqrt(ω₀² + ω² − 2ωω₀cosθ)`.
    pub fn rabi_frequency(&self) -> f64 {
        let (w0, w) = (self.omega0, self.omega);
        libm::sqrt((w0 * w0 + w * w - 2.0 * w * w0 * libm::cos(self.theta)).max(0.0))
    }
}

/// Parameters of the two-tone model
/// `H = −(ω₀/2)σz − [V cos ωt + V′ cos(ωt/𝒩)] σx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoToneParams {
    pub omega0: f64,
    pub v: f64,
    pub v_prime: f64,
    pub omega: f64,
    pub n_tone: u32,
}

impl TwoToneParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("omega0", self.omega0), ("v", self.v), ("omega", self.omega)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.v_prime.is_finite() && self.v_prime >= 0.0) {
            return Err(Error::invalid(format!("v_prime must be non-negative, got {}", self.v_prime)));
        }
        if self.n_tone == 0 {
            return Err(Error::invalid("n_tone must be a positive integer"));
        }
        Ok(())
    }

    /// True when `V′ ≪ V ≪ ω₀` holds at the 10% level.
    pub fn in_weak_drive_regime(&self) -> bool {
        self.v_prime <= 0.1 * self.v && self.v <= 0.1 * self.omega0
    }
}

/// One harmonic of a real Fourier series: `A cos(kωt) + B sin(kωt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTerm {
    pub harmonic: u32,
    pub cos: CMatrix,
    pub sin: CMatrix,
}

#[derive(Debug, Clone)]
pub struct FourierSeries {
    pub omega: f64,
    pub terms: Vec<FourierTerm>,
}

/// Which closed-form family a Hamiltonian belongs to.
#[derive(Debug, Clone)]
pub enum ModelKind {
    SchwingerRabi(SchwingerRabiParams),
    TwoTone { params: TwoToneParams, truncated: bool },
    Generic(FourierSeries),
    Dual(Arc<DualModel>),
}

/// A Hermitian, time-periodic Hamiltonian `H(t) = H(t + T)` (ħ = 1).
///
/// Instances are immutable and `Send + Sync`; evaluation is a pure function
/// of time.
#[derive(Debug, Clone)]
pub struct PeriodicHamiltonian {
    dimension: usize,
    period: f64,
    label: String,
    kind: ModelKind,
}

impl PeriodicHamiltonian {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Angular frequency `2π/T` of the full Hamiltonian.
    pub fn omega(&self) -> f64 {
        TAU / self.period
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn evaluate(&self, t: f64) -> CMatrix {
        match &self.kind {
            ModelKind::SchwingerRabi(p) => schwinger_rabi_matrix(p, t),
            ModelKind::TwoTone { params, truncated } => two_tone_matrix(params, *truncated, t),
            ModelKind::Generic(series) => fourier_value(series, self.dimension, t),
            ModelKind::Dual(dual) => dual.evaluate(t),
        }
    }

    /// Analytic `dH/dt`, when the model provides one.
    pub fn derivative(&self, t: f64) -> Option<CMatrix> {
        match &self.kind {
            ModelKind::SchwingerRabi(p) => Some(schwinger_rabi_derivative(p, t)),
            ModelKind::TwoTone { params, truncated } => Some(two_tone_derivative(params, *truncated, t)),
            ModelKind::Generic(series) => Some(fourier_derivative(series, self.dimension, t)),
            ModelKind::Dual(dual) => dual.derivative(t),
        }
    }

    /// Central finite difference of `evaluate` with step `h`.
    pub fn finite_difference(&self, t: f64, h: f64) -> CMatrix {
        (self.evaluate(t + h) - self.evaluate(t - h)).unscale(2.0 * h)
    }

    /// Analytic derivative when available, otherwise a central difference at
    /// step `T·1e-6`.
    pub fn derivative_or_fd(&self, t: f64) -> CMatrix {
        self.derivative(t).unwrap_or_else(|| self.finite_difference(t, self.period * 1e-6))
    }
}

fn schwinger_rabi_matrix(p: &SchwingerRabiParams, t: f64) -> CMatrix {
    let half = 0.5 * p.omega0;
    let diag = half * libm::cos(p.theta);
    let off = half * libm::sin(p.theta);
    let phase = cis(-p.omega * t);
    CMatrix::from_row_slice(2, 2, &[Complex64::from(diag), phase * off, phase.conj() * off, Complex64::from(-diag)])
}

fn schwinger_rabi_derivative(p: &SchwingerRabiParams, t: f64) -> CMatrix {
    let off = 0.5 * p.omega0 * libm::sin(p.theta);
    let upper = Complex64::new(0.0, -p.omega) * cis(-p.omega * t) * off;
    CMatrix::from_row_slice(2, 2, &[linalg::ZERO, upper, upper.conj(), linalg::ZERO])
}

fn two_tone_drive(p: &TwoToneParams, truncated: bool, t: f64) -> (f64, f64) {
    let slow = p.omega / f64::from(p.n_tone);
    let mut value = p.v * libm::cos(p.omega * t);
    let mut rate = -p.v * p.omega * libm::sin(p.omega * t);
    if !truncated {
        value += p.v_prime * libm::cos(slow * t);
        rate -= p.v_prime * slow * libm::sin(slow * t);
    }
    (value, rate)
}

fn two_tone_matrix(p: &TwoToneParams, truncated: bool, t: f64) -> CMatrix {
    let (drive, _) = two_tone_drive(p, truncated, t);
    let half = 0.5 * p.omega0;
    CMatrix::from_row_slice(
        2,
        2,
        &[Complex64::from(-half), Complex64::from(-drive), Complex64::from(-drive), Complex64::from(half)],
    )
}

fn two_tone_derivative(p: &TwoToneParams, truncated: bool, t: f64) -> CMatrix {
    let (_, rate) = two_tone_drive(p, truncated, t);
    CMatrix::from_row_slice(2, 2, &[linalg::ZERO, Complex64::from(-rate), Complex64::from(-rate), linalg::ZERO])
}

fn fourier_value(series: &FourierSeries, n: usize, t: f64) -> CMatrix {
    let mut h = CMatrix::zeros(n, n);
    for term in &series.terms {
        let arg = f64::from(term.harmonic) * series.omega * t;
        h += term.cos.scale(libm::cos(arg));
        if term.harmonic > 0 {
            h += term.sin.scale(libm::sin(arg));
        }
    }
    h
}

fn fourier_derivative(series: &FourierSeries, n: usize, t: f64) -> CMatrix {
    let mut dh = CMatrix::zeros(n, n);
    for term in series.terms.iter().filter(|term| term.harmonic > 0) {
        let rate = f64::from(term.harmonic) * series.omega;
        let arg = rate * t;
        dh += term.cos.scale(-rate * libm::sin(arg));
        dh += term.sin.scale(rate * libm::cos(arg));
    }
    dh
}

/// Driven two-level model with period `2π/ω`.
pub fn build_schwinger_rabi(p: SchwingerRabiParams) -> Result<PeriodicHamiltonian> {
    p.validate()?;
    Ok(PeriodicHamiltonian {
        dimension: 2,
        period: TAU / p.omega,
        label: format!("schwinger_rabi(omega0={}, theta={}, omega={})", p.omega0, p.theta, p.omega),
        kind: ModelKind::SchwingerRabi(p),
    })
}

/// Two-tone model. The full model has period `2π𝒩/ω`; with `truncated` the
/// `V′` term is dropped and the period is `2π/ω`.
pub fn build_two_tone(p: TwoToneParams, truncated: bool) -> Result<PeriodicHamiltonian> {
    p.validate()?;
    if p.v_prime > 0.1 * p.v || p.v > 0.1 * p.omega0 {
        log::warn!("two-tone parameters outside V' << V << omega0 (V'={}, V={}, omega0={})", p.v_prime, p.v, p.omega0);
    }
    let period = if truncated { TAU / p.omega } else { TAU * f64::from(p.n_tone) / p.omega };
    Ok(PeriodicHamiltonian {
        dimension: 2,
        period,
        label: format!(
            "two_tone(omega0={}, v={}, v_prime={}, omega={}, n_tone={}{})",
            p.omega0,
            p.v,
            p.v_prime,
            p.omega,
            p.n_tone,
            if truncated { ", truncated" } else { "" }
        ),
        kind: ModelKind::TwoTone { params: p, truncated },
    })
}

/// `H(t) = Σ_k [A_k cos(kωt) + B_k sin(kωt)]` with `ω = 2π/T`.
pub fn build_generic(dimension: usize, period: f64, terms: Vec<FourierTerm>) -> Result<PeriodicHamiltonian> {
    if dimension == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::invalid(format!("period must be positive, got {period}")));
    }
    for term in &terms {
        for (name, m) in [("cos", &term.cos), ("sin", &term.sin)] {
            if m.nrows() != dimension || m.ncols() != dimension {
                return Err(Error::invalid(format!(
                    "harmonic {} {name} coefficient is {}x{}, expected {dimension}x{dimension}",
                    term.harmonic,
                    m.nrows(),
                    m.ncols()
                )));
            }
            let defect = linalg::hermiticity_defect(m);
            if defect > HERMITIAN_TOL * linalg::max_abs(m).max(1.0) {
                return Err(Error::invalid(format!(
                    "harmonic {} {name} coefficient is not Hermitian (defect {defect:e})",
                    term.harmonic
                )));
            }
        }
    }
    Ok(PeriodicHamiltonian {
        dimension,
        period,
        label: format!("generic(n={dimension}, period={period}, harmonics={})", terms.len()),
        kind: ModelKind::Generic(FourierSeries { omega: TAU / period, terms }),
    })
}

/// The dual `H̄(t) = −U†(t)H(t)U(t)` of a base Hamiltonian, where `U` is the
/// base evolution operator from `t = 0`.
///
/// `U` is tabulated over one base period at the integrator resolution. Any
/// other time is reached with `U(t) = U(s, 0)·M^k`, `t = kT + s`, where `M`
/// is the base monodromy, followed by a single integrator step from the
/// nearest tabulated point.
#[derive(Debug)]
pub struct DualModel {
    base: PeriodicHamiltonian,
    cfg: IntegratorConfig,
    table_step: f64,
    table: Vec<CMatrix>,
    base_monodromy: CMatrix,
}

impl DualModel {
    pub fn base(&self) -> &PeriodicHamiltonian {
        &self.base
    }

    /// Base evolution operator `U(t, 0)`.
    pub fn base_propagator(&self, t: f64) -> CMatrix {
        let period = self.base.period();
        let cycles = libm::floor(t / period);
        let s = t - cycles * period;
        let last = self.table.len() - 1;
        let idx = (libm::floor(s / self.table_step) as usize).min(last);
        let anchor = idx as f64 * self.table_step;
        let within = if s - anchor > 0.0 {
            // Unitarity is guaranteed per step, so the step cannot fail.
            propagator::step(&self.base, anchor, s - anchor, self.cfg.scheme) * &self.table[idx]
        } else {
            self.table[idx].clone()
        };
        if cycles == 0.0 {
            within
        } else {
            within * linalg::unitary_power(&self.base_monodromy, cycles as i64)
        }
    }

    fn evaluate(&self, t: f64) -> CMatrix {
        let u = self.base_propagator(t);
        -(u.adjoint() * self.base.evaluate(t) * u)
    }

    // d/dt(−U†HU) = −U†(dH/dt)U: the terms from dU/dt cancel because
    // i dU/dt = HU.
    fn derivative(&self, t: f64) -> Option<CMatrix> {
        let dh = self.base.derivative(t)?;
        let u = self.base_propagator(t);
        Some(-(u.adjoint() * dh * u))
    }
}

/// Dual of the driven two-level model, with period `2π/Ω`,
/// `Ω = sqrt(ω₀² + ω² − 2ωω₀cosθ)`.
pub fn build_dual(base: &PeriodicHamiltonian, cfg: &IntegratorConfig) -> Result<PeriodicHamiltonian> {
    let ModelKind::SchwingerRabi(p) = base.kind() else {
        return Err(Error::invalid(
            "dual period is only known for the Schwinger-Rabi base; use build_dual_with_period",
        ));
    };
    let rabi = p.rabi_frequency();
    if rabi <= 1e-12 * p.omega0 {
        return Err(Error::invalid("dual period diverges at Omega = 0 (theta = 0, omega = omega0)"));
    }
    let dual = build_dual_with_period(base, TAU / rabi, cfg)?;
    Ok(PeriodicHamiltonian {
        label: format!("dual(omega0={}, theta={}, omega={})", p.omega0, p.theta, p.omega),
        ..dual
    })
}

/// Dual of an arbitrary periodic base with a caller-supplied period.
pub fn build_dual_with_period(
    base: &PeriodicHamiltonian,
    period: f64,
    cfg: &IntegratorConfig,
) -> Result<PeriodicHamiltonian> {
    cfg.validate()?;
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::invalid(format!("dual period must be positive, got {period}")));
    }
    let steps = cfg.steps_per_period;
    let table_step = base.period() / steps as f64;
    let mut table = Vec::with_capacity(steps + 1);
    let mut u = CMatrix::identity(base.dimension(), base.dimension());
    table.push(u.clone());
    for j in 0..steps {
        u = propagator::step(base, j as f64 * table_step, table_step, cfg.scheme) * u;
        table.push(u.clone());
    }
    let defect = linalg::unitarity_defect(&u);
    if defect > cfg.unitarity_tol {
        return Err(Error::PropagationFailure { t_start: 0.0, t_end: base.period(), defect });
    }
    let dual = DualModel { base: base.clone(), cfg: *cfg, table_step, base_monodromy: u, table };
    Ok(PeriodicHamiltonian {
        dimension: base.dimension(),
        period,
        label: format!("dual({})", base.label()),
        kind: ModelKind::Dual(Arc::new(dual)),
    })
}

/// Fourier coefficients reproducing the driven two-level model:
/// `A₀ = (ω₀/2)cosθ σz`, `A₁ = (ω₀/2)sinθ σx`, `B₁ = (ω₀/2)sinθ σy`.
pub fn schwinger_rabi_fourier_terms(p: &SchwingerRabiParams) -> Vec<FourierTerm> {
    let half = 0.5 * p.omega0;
    alloc::vec![
        FourierTerm { harmonic: 0, cos: linalg::pauli_z().scale(half * libm::cos(p.theta)), sin: CMatrix::zeros(2, 2) },
        FourierTerm {
            harmonic: 1,
            cos: linalg::pauli_x().scale(half * libm::sin(p.theta)),
            sin: linalg::pauli_y().scale(half * libm::sin(p.theta)),
        },
    ]
}
