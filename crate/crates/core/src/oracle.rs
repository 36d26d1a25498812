//! Closed-form reference results for the driven two-level model, its dual,
//! and the weakly driven two-tone model.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::floquet::fold_quasienergy;
use crate::models::{SchwingerRabiParams, TwoToneParams};

/// Default number of resonance orders reported.
pub const DEFAULT_RESONANCE_ORDERS: u32 = 10;

/// `√(ω₀² + ω² − 2ωω₀ cos θ)`.
pub fn rabi_frequency(p: &SchwingerRabiParams) -> f64 {
    let w0 = p.omega0;
    let w = p.omega;
    libm::sqrt((w0 * w0 + w * w - 2.0 * w * w0 * libm::cos(p.theta)).max(0.0))
}

/// Closed forms for the driven two-level model
/// `H = (ω₀/2)[cos θ σ_z + sin θ (cos ωt σ_x + sin ωt σ_y)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Example1Closed {
    pub params: SchwingerRabiParams,
    pub rabi: f64,
    /// `±Ω/2 + ω/2` folded into the zone of width `ω`, ascending. The
    /// rotating-frame values `±Ω/2` differ by the `ω/2` carried by the
    /// frame rotation; both give the same gap factor.
    pub quasienergies: [f64; 2],
    /// `(ω sin θ / Ω)²`, the peak transition probability.
    pub mixing: f64,
    /// `(ω sin θ / Ω)² / 2`.
    pub exact_criterion: f64,
    /// Drive frequencies at which the quasienergies become degenerate,
    /// as `(order, ω_k)`.
    pub resonances: Vec<(u32, f64)>,
}

impl Example1Closed {
    /// `|⟨E₀(t)|U(t,0)|E₀(0)⟩| = √(1 − (ω sin θ/Ω)² sin²(Ωt/2))`.
    pub fn overlap(&self, t: f64) -> f64 {
        let s = libm::sin(self.rabi * t / 2.0);
        libm::sqrt((1.0 - self.mixing * s * s).clamp(0.0, 1.0))
    }

    pub fn min_overlap(&self) -> f64 {
        libm::sqrt((1.0 - self.mixing).clamp(0.0, 1.0))
    }

    /// `sin²(π sin θ / 2) / sin²(πΩ/ω)`, the δ of the Floquet condition.
    pub fn delta(&self) -> f64 {
        let p = &self.params;
        let arc = PI * libm::sin(p.theta) / 2.0;
        let gap = libm::sin(PI * self.rabi / p.omega);
        let num = libm::sin(arc);
        num * num / (gap * gap)
    }

    /// `|sin(π(ε₁ − ε₀)/ω)|`.
    pub fn gap_factor(&self) -> f64 {
        libm::fabs(libm::sin(PI * self.rabi / self.params.omega))
    }
}

pub fn example1(p: &SchwingerRabiParams) -> Result<Example1Closed> {
    example1_with_orders(p, DEFAULT_RESONANCE_ORDERS)
}

pub fn example1_with_orders(p: &SchwingerRabiParams, k_max: u32) -> Result<Example1Closed> {
    p.validate()?;
    let rabi = rabi_frequency(p);
    let ratio = p.omega * libm::sin(p.theta) / rabi;
    let mixing = if rabi > 0.0 { ratio * ratio } else { 0.0 };
    let shift = p.omega / 2.0;
    let mut quasienergies =
        [fold_quasienergy(shift - rabi / 2.0, p.omega), fold_quasienergy(shift + rabi / 2.0, p.omega)];
    quasienergies.sort_by(f64::total_cmp);
    Ok(Example1Closed {
        params: *p,
        rabi,
        quasienergies,
        mixing: mixing.min(1.0),
        exact_criterion: mixing.min(1.0) / 2.0,
        resonances: resonances(p.omega0, p.theta, k_max),
    })
}

/// Solutions of `Ω(ω) = kω` for `k = 1..=k_max`, where the quasienergy
/// splitting is a whole multiple of `ω`. Order 1 exists only for
/// `θ < π/2`.
pub fn resonances(omega0: f64, theta: f64, k_max: u32) -> Vec<(u32, f64)> {
    let c = libm::cos(theta);
    let mut out = Vec::new();
    for k in 1..=k_max {
        let w = if k == 1 {
            if c <= 0.0 {
                continue;
            }
            omega0 / (2.0 * c)
        } else {
            let m = f64::from(k * k - 1);
            omega0 * (libm::sqrt(c * c + m) - c) / m
        };
        out.push((k, w));
    }
    out
}

/// The resonance expression in its originally published form,
/// `[√(cos²θ + 4(k²−1)) − cos θ]·ω₀ / (2(k²−1))` for `k ≥ 2`. It does not
/// satisfy `Ω = kω`; kept for comparison with [`resonances`].
pub fn resonances_as_printed(omega0: f64, theta: f64, k_max: u32) -> Vec<(u32, f64)> {
    let c = libm::cos(theta);
    let mut out = Vec::new();
    if c > 0.0 && k_max >= 1 {
        out.push((1, omega0 / (2.0 * c)));
    }
    for k in 2..=k_max {
        let m = f64::from(k * k - 1);
        out.push((k, (libm::sqrt(c * c + 4.0 * m) - c) * omega0 / (2.0 * m)));
    }
    out
}

/// Closed forms for the dual of the driven two-level model.
#[derive(Debug, Clone, PartialEq)]
pub struct Example2Closed {
    pub params: SchwingerRabiParams,
    pub rabi: f64,
    /// `2π/Ω`.
    pub period: f64,
    /// `Ω/2 ± ω/2` folded into the zone of width `Ω`, ascending.
    pub quasienergies: [f64; 2],
    /// `sin²θ / 2`.
    pub exact_criterion: f64,
}

impl Example2Closed {
    /// `√(1 − sin²θ sin²(ωt/2))`.
    pub fn overlap(&self, t: f64) -> f64 {
        let st = libm::sin(self.params.theta);
        let s = libm::sin(self.params.omega * t / 2.0);
        libm::sqrt((1.0 - st * st * s * s).clamp(0.0, 1.0))
    }

    /// `|cos θ|`, reached at `ωt = π`.
    pub fn min_overlap(&self) -> f64 {
        libm::fabs(libm::cos(self.params.theta))
    }

    /// `|sin(πω/Ω)|`.
    pub fn gap_factor(&self) -> f64 {
        libm::fabs(libm::sin(PI * self.params.omega / self.rabi))
    }

    /// `±ω/2` folded into `(−Ω/4, Ω/4]`, the form in which the dual
    /// quasienergies were originally quoted.
    pub fn quasienergies_as_printed(&self) -> [f64; 2] {
        let half = self.rabi / 2.0;
        let w = self.params.omega / 2.0;
        let mut q = [fold_quasienergy(-w, half), fold_quasienergy(w, half)];
        q.sort_by(f64::total_cmp);
        q
    }
}

pub fn example2(p: &SchwingerRabiParams) -> Result<Example2Closed> {
    p.validate()?;
    let rabi = rabi_frequency(p);
    if rabi <= 1e-12 * p.omega0 {
        return Err(Error::invalid("the dual model needs a non-zero Rabi frequency"));
    }
    let mut quasienergies =
        [fold_quasienergy(rabi / 2.0 - p.omega / 2.0, rabi), fold_quasienergy(rabi / 2.0 + p.omega / 2.0, rabi)];
    quasienergies.sort_by(f64::total_cmp);
    let st = libm::sin(p.theta);
    Ok(Example2Closed { params: *p, rabi, period: TAU / rabi, quasienergies, exact_criterion: st * st / 2.0 })
}

/// Rotating-wave results for the two-tone model near resonance.
#[derive(Debug, Clone, PartialEq)]
pub struct Example3Closed {
    pub params: TwoToneParams,
    /// `ω − ω₀`.
    pub detuning: f64,
    /// `√(Δω² + V²)`.
    pub generalized_rabi: f64,
    /// `√(ω₀² + 4V²)`.
    pub dressed_splitting: f64,
    /// `±(ω + Ω_R)/2`, ascending.
    pub quasienergies_rwa: [f64; 2],
    /// `|Δω| ≤ 10V` and `V ≤ ω₀/10`.
    pub trusted: bool,
}

impl Example3Closed {
    /// `(V/Ω′)² sin²(Ω′t/2)`.
    pub fn rwa_probability(&self, t: f64) -> f64 {
        let r = self.params.v / self.generalized_rabi;
        let s = libm::sin(self.generalized_rabi * t / 2.0);
        (r * r * s * s).clamp(0.0, 1.0)
    }

    /// `(V/Ω′)²`.
    pub fn max_probability(&self) -> f64 {
        let r = self.params.v / self.generalized_rabi;
        r * r
    }

    /// Instantaneous gap `√(ω₀² + 4V² cos²ωt)` of the single-tone part, as
    /// obtained by diagonalizing `−(ω₀/2)σ_z − V cos ωt σ_x`.
    pub fn gap(&self, t: f64) -> f64 {
        let p = &self.params;
        let c = libm::cos(p.omega * t);
        libm::sqrt(p.omega0 * p.omega0 + 4.0 * p.v * p.v * c * c)
    }

    /// The gap as originally quoted, `√(ω₀² + 4V² sin²ωt)`. It is the
    /// quarter-period shift of [`Example3Closed::gap`].
    pub fn gap_as_printed(&self, t: f64) -> f64 {
        let p = &self.params;
        let s = libm::sin(p.omega * t);
        libm::sqrt(p.omega0 * p.omega0 + 4.0 * p.v * p.v * s * s)
    }

    /// RWA error scale used when comparing with full evolution.
    pub fn tolerance(&self) -> f64 {
        5.0 * self.params.v / self.params.omega0
    }
}

pub fn example3(p: &TwoToneParams) -> Result<Example3Closed> {
    p.validate()?;
    let detuning = p.omega - p.omega0;
    let generalized_rabi = libm::sqrt(detuning * detuning + p.v * p.v);
    if generalized_rabi == 0.0 {
        return Err(Error::invalid("the rotating-wave result needs a non-zero drive or detuning"));
    }
    let dressed_splitting = libm::sqrt(p.omega0 * p.omega0 + 4.0 * p.v * p.v);
    let e = (p.omega + dressed_splitting) / 2.0;
    Ok(Example3Closed {
        params: *p,
        detuning,
        generalized_rabi,
        dressed_splitting,
        quasienergies_rwa: [-e, e],
        trusted: libm::fabs(detuning) <= 10.0 * p.v && p.v <= 0.1 * p.omega0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_3;

    fn sr(omega0: f64, theta: f64, omega: f64) -> SchwingerRabiParams {
        SchwingerRabiParams::new(omega0, theta, omega).unwrap()
    }

    fn two_tone(v: f64, omega: f64) -> TwoToneParams {
        TwoToneParams { omega0: 1.0, v, v_prime: 0.0, omega, n_tone: 1 }
    }

    #[test]
    fn example1_unit_rabi() {
        let e = example1(&sr(1.0, FRAC_PI_3, 1.0)).unwrap();
        assert!((e.rabi - 1.0).abs() < 1e-14);
        assert!((e.overlap(PI) - 0.5).abs() < 1e-14);
        assert!((e.min_overlap() - 0.5).abs() < 1e-14);
        assert_eq!(e.overlap(0.0), 1.0);
    }

    #[test]
    fn example1_near_resonance() {
        let e = example1(&sr(1.0, 0.1, 1.0)).unwrap();
        assert!((e.rabi - 0.099_958_3).abs() < 1e-7);
        assert!((e.exact_criterion - 0.498_75).abs() < 1e-5);
        assert!((e.delta() - 0.2557).abs() < 5e-4, "{}", e.delta());
    }

    #[test]
    fn resonance_orders_solve_the_degeneracy_condition() {
        for &theta in &[0.0, 0.1, 1.0, 2.5] {
            for (k, w) in resonances(1.0, theta, 10) {
                let rabi = rabi_frequency(&sr(1.0, theta, w));
                assert!((rabi - f64::from(k) * w).abs() < 1e-12, "theta {theta} k {k}");
            }
        }
        let flat = resonances(1.0, 0.0, 3);
        assert!((flat[1].1 - 1.0 / 3.0).abs() < 1e-15);
        assert!(resonances(1.0, 2.0, 3).iter().all(|&(k, _)| k >= 2));
    }

    #[test]
    fn printed_resonances_differ_beyond_first_order() {
        let printed = resonances_as_printed(1.0, 0.0, 2);
        assert!((printed[1].1 - (libm::sqrt(13.0) - 1.0) / 6.0).abs() < 1e-15);
        assert!((printed[1].1 - 0.434_26).abs() < 1e-5);
        assert_eq!(printed[0], resonances(1.0, 0.0, 1)[0]);
    }

    #[test]
    fn example2_values() {
        let flat = example2(&sr(1.0, 0.0, 0.7)).unwrap();
        assert!((0..50).all(|i| flat.overlap(f64::from(i) * 0.37) == 1.0));
        let tilted = example2(&sr(1.0, FRAC_PI_2, 1.0)).unwrap();
        assert!(tilted.overlap(PI) < 1e-12);
        let e = example2(&sr(1.0, 0.1, 1.0)).unwrap();
        assert!((e.exact_criterion - 0.004_983).abs() < 1e-6);
        let d = example2(&sr(1.0, FRAC_PI_3, 1.0)).unwrap();
        assert!((d.period - TAU).abs() < 1e-12);
        assert!(d.quasienergies.iter().all(|q| q.abs() < 1e-9), "{:?}", d.quasienergies);
        assert!(d.gap_factor() < 1e-12);
    }

    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn example3_values() {
        let res = example3(&two_tone(0.05, 1.0)).unwrap();
        assert!((res.max_probability() - 1.0).abs() < 1e-15);
        assert!((res.dressed_splitting - 1.004_99).abs() < 1e-5);
        assert!((res.quasienergies_rwa[1] - 1.002_49).abs() < 1e-5);
        assert!(res.trusted);
        let off = example3(&two_tone(0.05, 1.05)).unwrap();
        assert!((off.generalized_rabi - 0.070_711).abs() < 1e-6);
        assert!((off.max_probability() - 0.5).abs() < 1e-12);
        assert!((res.gap(0.0) - libm::sqrt(1.01)).abs() < 1e-15);
        assert!((res.gap_as_printed(0.0) - 1.0).abs() < 1e-15);
        assert!((res.gap_as_printed(FRAC_PI_2) - res.gap(0.0)).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        let bad = SchwingerRabiParams { omega0: 1.0, theta: -0.1, omega: 1.0 };
        assert!(example1(&bad).is_err());
        assert!(example2(&bad).is_err());
        assert!(example2(&sr(1.0, 0.0, 1.0)).is_err());
    }
}
