//! Adiabaticity conditions for periodically driven quantum systems.
//!
//! The crate evaluates the traditional, frequency, Floquet and finite-time
//! criteria for quantum adiabaticity of a time-periodic Hamiltonian, together
//! with the overlap bounds that back them. The numerical pipeline is
//!
//! 1. [`models`]: a [`PeriodicHamiltonian`] (driven two-level model, its dual,
//!    the two-tone model, or a user-defined Fourier series);
//! 2. [`propagator`]: unitary propagators and the one-period monodromy;
//! 3. [`floquet`]: quasienergies and Floquet modes from the monodromy;
//! 4. [`spectrum`]: instantaneous eigensystems and the couplings
//!    `|⟨E_m|Ė_n⟩|`;
//! 5. [`conditions`]: ratios, verdicts and bounds, bundled by [`analyze`].
//!
//! [`oracle`] holds closed-form results for the three worked models and is
//! used as ground truth by the tests.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod conditions;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod propagator;
pub mod spectrum;

pub use conditions::{analyze, analyze_with, AnalysisOptions, ConditionReport, Threshold};
pub use error::{Error, Result};
pub use floquet::{FloquetDecomposition, FloquetExpansion};
pub use linalg::{CMatrix, CVector};
pub use models::{
    build_dual, build_generic, build_schwinger_rabi, build_two_tone, FourierTerm, ModelKind, PeriodicHamiltonian,
    SchwingerRabiParams, TwoToneParams,
};
pub use num_complex::Complex64;
pub use propagator::{monodromy, propagate, IntegratorConfig, Scheme, UnitaryPropagator};
pub use spectrum::{CouplingProfile, InstantaneousSpectrum};
