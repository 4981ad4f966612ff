//! Resonance scattering from a zero-range potential with inner structure.
//!
//! A point interaction alone produces a featureless s-wave cross section.
//! Coupling the contact condition to a finite-dimensional inner system —
//! realized as a self-adjoint extension in a Pontryagin space — deforms
//! the effective-range function into
//!
//! ```text
//! F(k) = k cot delta(k) = epsilon - gamma * prod_s (k_s^2 - k^2)
//! ```
//!
//! so the cross section develops genuine resonance peaks at the design
//! wave numbers `k_s` while keeping the low-energy observables `a` (the
//! scattering length) and `r0` (the effective range) intact.
//!
//! The crate is organized bottom-up:
//!
//! * [`pontryagin`] — indefinite-metric linear algebra: boundary forms,
//!   defect elements, Q-functions and the resolvent of an extension;
//! * [`model`] — the inner spectrum, reduced parameters, extension data
//!   (`Lambda`, weights, metric) and both evaluation routes for `F`;
//! * [`fitting`] — observables `(a, r0, {k_s})` to model and back;
//! * [`scattering`] — phase shifts, S-matrix, cross sections, and the
//!   transition amplitudes computed two independent ways;
//! * [`spectral`] — resolvent poles and zeros, their classification, and
//!   the dispersion identity at bound states;
//! * [`baselines`] — Wigner cross section, effective-range form, and the
//!   delta-shell squeezing sequence;
//! * [`cli`] — config parsing and report construction for the `zrp` binary.

pub mod baselines;
pub mod cli;
mod dd;
pub mod error;
pub mod fitting;
pub mod model;
pub mod polynomial;
pub mod pontryagin;
pub mod scattering;
pub mod spectral;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub use fitting::{PhysicalObservables, ScatteringModel};
pub use model::{ExtensionParameters, InnerSpectrum, ReducedParameters};
pub use scattering::ScatteringPoint;
pub use spectral::{PoleKind, PoleRecord, PoleZeroReport};
