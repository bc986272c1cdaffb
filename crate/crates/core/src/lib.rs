//! Numerical laboratory for the 1-D Bose-Einstein Kac grazing-limit model
//!
//! ```text
//!     df/dt = A_f(t) d²f/dv² + B_f(t) d/dv ( v f (1 + f) ),        v in R,
//!
//!     A_f(t) = ∫ v² f (1 + f) dv,     B_f(t) = ∫ f dv.
//! ```
//!
//! The equation conserves mass `m = ∫ f dv` and kinetic energy
//! `e = ∫ v² f dv`, dissipates the quantum entropy
//! `H(f) = ∫ [f log f - (1+f) log(1+f)] dv`, and drives every admissible
//! initial state towards the Bose distribution
//! `f∞(v) = 1 / (exp(λ₁ v² - λ₂) - 1)` sharing its mass and energy.
//!
//! The crate provides:
//!
//! * [`grid`] — truncated uniform velocity meshes, distribution states and
//!   the midpoint quadrature every other module uses;
//! * [`moments`] — conserved quantities, the nonlocal coefficients `A_f`,
//!   `B_f` and the norms entering the a-priori estimates;
//! * [`entropy`] — the entropy `γ`, total / relative entropy, the discrete
//!   entropy production and the Csiszár–Kullback–Pinsker-type `L¹` bound;
//! * [`equilibrium`] — Bose distribution evaluation, polylogarithm moments
//!   and the `(m, e) → (λ₁, z)` fit;
//! * [`scheme`] — the structure-preserving finite-volume discretization with
//!   an adaptive explicit time-stepping controller;
//! * [`analysis`] — runtime monitors for the model's inequalities and the
//!   exponential decay-rate estimator;
//! * [`presets`] — the five bundled experiment initial profiles;
//! * [`quadrature`] — an adaptive Gauss–Kronrod integrator used as the
//!   independent oracle for all special-function evaluations.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod entropy;
pub mod equilibrium;
mod error;
pub mod grid;
pub mod moments;
pub mod presets;
pub mod quadrature;
pub mod scheme;

pub use analysis::{DecayFit, DecayQuantity, MonitorReport, TimeSeriesRecord};
pub use entropy::EntropyReport;
pub use equilibrium::BoseParameters;
pub use error::{Error, Result};
pub use grid::{DistributionState, VelocityGrid};
pub use moments::MomentSet;
pub use scheme::{FaceQuantities, SchemeConfig};
