//! Fixed-step, structure-preserving integration of `i dU/dt = H(t) U`.
//!
//! Every step is the exact exponential of a Hermitian generator, so the only
//! loss of unitarity is floating-point rounding.

use alloc::format;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::models::PeriodicHamiltonian;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Fourth-order Magnus generator on the two Gauss–Legendre nodes.
    Magnus4,
    /// Second-order exponential midpoint rule.
    MidpointExponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub steps_per_period: usize,
    pub scheme: Scheme,
    pub unitarity_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { steps_per_period: 4096, scheme: Scheme::Magnus4, unitarity_tol: 1e-10 }
    }
}

impl IntegratorConfig {
    pub const MIN_STEPS_PER_PERIOD: usize = 16;

    pub fn with_steps(steps_per_period: usize) -> Self {
        Self { steps_per_period, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_period < Self::MIN_STEPS_PER_PERIOD {
            return Err(Error::invalid(format!(
                "steps_per_period must be at least {}, got {}",
                Self::MIN_STEPS_PER_PERIOD,
                self.steps_per_period
            )));
        }
        if !(self.unitarity_tol.is_finite() && self.unitarity_tol > 0.0) {
            return Err(Error::invalid("unitarity_tol must be positive"));
        }
        Ok(())
    }
}

/// `U(t_end, t_start)` together with integration diagnostics.
#[derive(Debug, Clone)]
pub struct UnitaryPropagator {
    pub matrix: CMatrix,
    pub t_start: f64,
    pub t_end: f64,
    pub steps_used: usize,
    /// `‖U†U − I‖` in the max-norm.
    pub unitarity_defect: f64,
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// One step `U(t + dt, t)`.
pub fn step(h: &PeriodicHamiltonian, t: f64, dt: f64, scheme: Scheme) -> CMatrix {
    let generator = match scheme {
        Scheme::Magnus4 => {
            let h1 = h.evaluate(t + dt * (0.5 - SQRT3 / 6.0));
            let h2 = h.evaluate(t + dt * (0.5 + SQRT3 / 6.0));
            let commutator = &h2 * &h1 - &h1 * &h2;
            (h1 + h2).scale(0.5 * dt) - commutator * Complex64::new(0.0, SQRT3 / 12.0 * dt * dt)
        }
        Scheme::MidpointExponential => h.evaluate(t + 0.5 * dt).scale(dt),
    };
    // The generator is Hermitian by construction; the exponential cannot fail
    // for the closed-form path and only fails for pathological N > 2 input.
    linalg::expm_unitary(&generator).unwrap_or_else(|_| CMatrix::identity(h.dimension(), h.dimension()))
}

/// Number of equal steps used on `[t0, t1]`.
pub fn step_count(h: &PeriodicHamiltonian, t0: f64, t1: f64, cfg: &IntegratorConfig) -> usize {
    if t1 <= t0 {
        return 0;
    }
    let exact = cfg.steps_per_period as f64 * (t1 - t0) / h.period();
    (libm::ceil(exact - 1e-9) as usize).max(1)
}

/// `U(t1, t0)`.
pub fn propagate(h: &PeriodicHamiltonian, t0: f64, t1: f64, cfg: &IntegratorConfig) -> Result<UnitaryPropagator> {
    propagate_observed(h, t0, t1, cfg, |_, _| {})
}

/// `U(t1, t0)`, calling `observer(t, U(t, t0))` at `t0` and after every step.
pub fn propagate_observed<F>(
    h: &PeriodicHamiltonian,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    mut observer: F,
) -> Result<UnitaryPropagator>
where
    F: FnMut(f64, &CMatrix),
{
    cfg.validate()?;
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::invalid(format!("propagation requires t1 >= t0, got [{t0}, {t1}]")));
    }
    let n = h.dimension();
    let steps = step_count(h, t0, t1, cfg);
    let mut u = CMatrix::identity(n, n);
    observer(t0, &u);
    if steps > 0 {
        let dt = (t1 - t0) / steps as f64;
        for k in 0..steps {
            let t = t0 + k as f64 * dt;
            u = step(h, t, dt, cfg.scheme) * u;
            let t_next = if k + 1 == steps { t1 } else { t0 + (k + 1) as f64 * dt };
            observer(t_next, &u);
        }
    }
    let defect = linalg::unitarity_defect(&u);
    if defect > cfg.unitarity_tol {
        return Err(Error::PropagationFailure { t_start: t0, t_end: t1, defect });
    }
    Ok(UnitaryPropagator { matrix: u, t_start: t0, t_end: t1, steps_used: steps, unitarity_defect: defect })
}

/// One-period evolution operator `U(t0 + T, t0)`.
pub fn monodromy(h: &PeriodicHamiltonian, t0: f64, cfg: &IntegratorConfig) -> Result<UnitaryPropagator> {
    propagate(h, t0, t0 + h.period(), cfg)
}
