//! Error type shared by every module of the crate.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// Spectrum construction rejected the input wave numbers.
    #[error("invalid spectrum: {reason}")]
    InvalidSpectrum { reason: String },

    /// The alternating sum defining the normalization constant vanishes, so
    /// no canonical weight normalization exists for this spectrum.
    #[error("non-generic spectrum: alternating normalization sum {sum:.3e} vanishes within tolerance")]
    NonGenericSpectrum { sum: f64 },

    /// The observables sit on the manifold where the bare scattering length
    /// diverges; no finite reduced parameter set reproduces them.
    #[error(
        "observables not representable: epsilon = {epsilon:.3e} with |epsilon * a| = {product:.3e} below 1e-12, \
         the bare scattering length diverges"
    )]
    InvalidObservables { epsilon: f64, product: f64 },

    /// A scalar argument failed validation (sign, finiteness, range).
    #[error("invalid parameter: {message}")]
    InvalidParameter { message: String },

    /// Two containers that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The requested point coincides exactly with an inner eigenvalue, where
    /// the resolvent and the Q-function have poles.
    #[error("spectral singularity: lambda = {lambda} coincides with an inner eigenvalue")]
    SpectralSingularity { lambda: Complex64 },

    /// Gamma - Q(lambda) = 0: the point is an eigenvalue of the coupled
    /// extension and the resolvent correction term diverges.
    #[error("extension singularity: Gamma - Q(lambda) vanishes at lambda = {lambda}")]
    ExtensionSingularity { lambda: Complex64 },

    /// The resolvent formula is implemented for the rank-one coupling only.
    #[error("krein_resolvent supports a scalar boundary parameter only")]
    HigherRankGamma,

    /// The boundary form is stated for a generating vector with [e, e] = 1.
    #[error("generating vector is not normalized: [e, e] = {e_norm} (expected 1)")]
    NotNormalized { e_norm: f64 },

    /// Two independent evaluation routes of the same quantity disagree
    /// beyond the stated tolerance; the inputs are inconsistent.
    #[error("dual-route disagreement in {context}: relative residual {residual:.3e}")]
    DualRouteMismatch { context: &'static str, residual: f64 },

    /// The 2x2 amplitude system is exactly singular.
    #[error("amplitude system is singular: det = {det}")]
    SingularAmplitudeSystem { det: Complex64 },

    /// A 1-based resonance index does not address the spectrum.
    #[error("resonance index {index} out of range for a spectrum of {len} resonances")]
    IndexOutOfRange { index: usize, len: usize },

    /// The denominator of the fraction form of F vanished exactly.
    #[error("vanishing fraction denominator at lambda = {lambda}")]
    VanishingDenominator { lambda: Complex64 },

    /// The attractive delta-shell phase hits a tangent singularity.
    #[error("delta-shell sequence diverges: x = {x:.12e} is within 1e-8 of an odd multiple of pi/2")]
    DivergentDeltaSequence { x: f64 },
}
