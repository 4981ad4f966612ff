//! Core data of the solvable model: the inner resonance spectrum, the two
//! parameter families living on either side of the fit (reduced polynomial
//! parameters and extension parameters of the boundary realization), the
//! spectral form of the Q-function, and the two dual forms of
//! F(k) = k cot(delta).
//!
//! The polynomial form is
//!
//!   F(k) = epsilon - gamma_coef * prod_s (k_s^2 - k^2),
//!
//! while the fraction form goes through the boundary parameters,
//!
//!   F(k) = 4 pi k0 * (gamma00 - |gamma01|^2 / (gamma11 - Q(lambda))),
//!
//! with lambda = (k/k0)^2. Keeping both alive and comparing them is the
//! crate's central self-check, so nothing here ever rewrites one form into
//! the other.

use num_complex::Complex64;
use serde::Serialize;

use crate::dd::{Dd, DdC};
use crate::pontryagin::MetricSignature;
use crate::{Error, Result};

pub(crate) const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Relative tolerance deciding that the alternating normalization sum has
/// genuinely vanished rather than merely cancelled small.
pub const NON_GENERIC_TOL: f64 = 1e-12;

/// Inner resonance spectrum: characteristic wave number k0 > 0 and strictly
/// increasing resonance wave numbers k_s > 0. The inner eigenvalues are
/// lambda_s = (k_s / k0)^2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerSpectrum {
    k0: f64,
    ks: Vec<f64>,
}

impl InnerSpectrum {
    /// Minimum relative gap between consecutive k_s^2: every weight divides
    /// by every pairwise gap, so near-degenerate spectra are rejected up
    /// front instead of producing garbage weights.
    pub const MIN_RELATIVE_GAP: f64 = 1e-9;

    pub fn new(k0: f64, ks: Vec<f64>) -> Result<Self> {
        if !(k0.is_finite() && k0 > 0.0) {
            return Err(Error::InvalidSpectrum {
                reason: format!("k0 = {k0} must be positive and finite"),
            });
        }
        for (i, &k) in ks.iter().enumerate() {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::InvalidSpectrum {
                    reason: format!("k[{i}] = {k} must be positive and finite"),
                });
            }
        }
        for i in 1..ks.len() {
            if ks[i] <= ks[i - 1] {
                return Err(Error::InvalidSpectrum {
                    reason: format!(
                        "resonance wave numbers must be strictly increasing: k[{}] = {} >= k[{}] = {}",
                        i - 1,
                        ks[i - 1],
                        i,
                        ks[i]
                    ),
                });
            }
            let (lo, hi) = (ks[i - 1] * ks[i - 1], ks[i] * ks[i]);
            if hi - lo < Self::MIN_RELATIVE_GAP * hi {
                return Err(Error::InvalidSpectrum {
                    reason: format!(
                        "squared wave numbers {lo} and {hi} are degenerate within relative gap {:e}",
                        Self::MIN_RELATIVE_GAP
                    ),
                });
            }
        }
        Ok(InnerSpectrum { k0, ks })
    }

    /// Number of resonances N.
    pub fn dim(&self) -> usize {
        self.ks.len()
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn ks(&self) -> &[f64] {
        &self.ks
    }

    /// Inner eigenvalues lambda_s = (k_s/k0)^2, ascending.
    pub fn lambdas(&self) -> Vec<f64> {
        self.ks.iter().map(|&k| (k / self.k0) * (k / self.k0)).collect()
    }
}

/// Polynomial-side parameters: bare scattering length `a0` and coupling
/// strength `alpha`, with the derived pair epsilon = -1/a0 and
/// gamma_coef = alpha a0^(2N-1) that enter F(k) directly. The derived pair
/// is stored so that the identities hold bit-exactly against the stored
/// (a0, alpha).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedParameters {
    a0: f64,
    alpha: f64,
    epsilon: f64,
    gamma_coef: f64,
}

impl ReducedParameters {
    pub fn new(a0: f64, alpha: f64, n: usize) -> Result<Self> {
        if !a0.is_finite() || a0 == 0.0 {
            return Err(Error::InvalidParameter {
                message: format!("bare scattering length a0 = {a0} must be nonzero and finite"),
            });
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                message: format!("coupling strength alpha = {alpha} must be finite"),
            });
        }
        let epsilon = -1.0 / a0;
        let gamma_coef = alpha * a0.powi(2 * n as i32 - 1);
        if !gamma_coef.is_finite() {
            return Err(Error::InvalidParameter {
                message: format!("alpha * a0^(2N-1) overflows for a0 = {a0}, alpha = {alpha}, N = {n}"),
            });
        }
        Ok(ReducedParameters { a0, alpha, epsilon, gamma_coef })
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// epsilon = -1/a0.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// gamma_coef = alpha * a0^(2N-1), the coefficient of the product term.
    pub fn gamma_coef(&self) -> f64 {
        self.gamma_coef
    }
}

/// Boundary-side parameters of the rank-one realization. All fields are
/// derived from (spectrum, reduced) by `fitting::extension_from_reduced`;
/// they satisfy P_s = g_ss |e_s|^2, sum_s P_s = e_norm = +-1 and
/// |gamma01|^2 > 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionParameters {
    #[serde(rename = "Lambda")]
    lambda_big: f64,
    #[serde(rename = "P")]
    weights: Vec<f64>,
    #[serde(rename = "g")]
    metric: MetricSignature,
    e_abs2: Vec<f64>,
    gamma00: f64,
    gamma01_abs2: f64,
    gamma11: f64,
    e_norm: f64,
}

impl ExtensionParameters {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lambda_big: f64,
        weights: Vec<f64>,
        metric: MetricSignature,
        e_abs2: Vec<f64>,
        gamma00: f64,
        gamma01_abs2: f64,
        gamma11: f64,
        e_norm: f64,
    ) -> Result<Self> {
        let n = weights.len();
        if metric.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: metric.len() });
        }
        if e_abs2.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: e_abs2.len() });
        }
        if lambda_big == 0.0 || !lambda_big.is_finite() {
            return Err(Error::InvalidParameter {
                message: format!("normalization constant Lambda = {lambda_big} must be nonzero and finite"),
            });
        }
        if gamma01_abs2 <= 0.0 || !gamma01_abs2.is_finite() {
            return Err(Error::InvalidParameter {
                message: format!("|gamma01|^2 = {gamma01_abs2} must be positive"),
            });
        }
        Ok(ExtensionParameters {
            lambda_big,
            weights,
            metric,
            e_abs2,
            gamma00,
            gamma01_abs2,
            gamma11,
            e_norm,
        })
    }

    /// Normalization constant Lambda (sign matched to gamma_coef).
    pub fn lambda_big(&self) -> f64 {
        self.lambda_big
    }

    /// Spectral weights P_s.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn metric(&self) -> &MetricSignature {
        &self.metric
    }

    /// |e_s|^2 = |P_s|.
    pub fn e_abs2(&self) -> &[f64] {
        &self.e_abs2
    }

    pub fn gamma00(&self) -> f64 {
        self.gamma00
    }

    pub fn gamma01_abs2(&self) -> f64 {
        self.gamma01_abs2
    }

    /// Real representative gamma10 = +sqrt(|gamma01|^2); the observables fix
    /// only the modulus of the off-diagonal coupling, so the phase is gauged
    /// away.
    pub fn gamma10(&self) -> f64 {
        self.gamma01_abs2.sqrt()
    }

    pub fn gamma11(&self) -> f64 {
        self.gamma11
    }

    /// [e, e] = sum_s P_s, always +-1.
    pub fn e_norm(&self) -> f64 {
        self.e_norm
    }

    /// Copy with the weight vector replaced and everything else untouched.
    /// Diagnostic hook: deliberately breaking the Laurent cancellation is
    /// the standard way to prove the validation battery has teeth.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: weights.len(),
            });
        }
        Ok(ExtensionParameters { weights, ..self.clone() })
    }
}

/// Normalization constant of the weight family,
///
///   Lambda = 1 / sum_s (-1)^s / ((1 + lambda_s^2) prod_{t != s} |lambda_t - lambda_s|),
///
/// with s counted from 1. Returns `Ok(None)` for an empty spectrum (no inner
/// structure, nothing to normalize) and `NonGenericSpectrum` when the
/// alternating sum cancels below `NON_GENERIC_TOL` relative to its terms.
pub fn normalization_constant(spectrum: &InnerSpectrum) -> Result<Option<f64>> {
    let lambdas = spectrum.lambdas();
    if lambdas.is_empty() {
        return Ok(None);
    }
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for (s, &ls) in lambdas.iter().enumerate() {
        let mut prod = 1.0 + ls * ls;
        for (t, &lt) in lambdas.iter().enumerate() {
            if t != s {
                prod *= (lt - ls).abs();
            }
        }
        let sign = if s % 2 == 0 { -1.0 } else { 1.0 }; // (-1)^s with s starting at 1
        let term = sign / prod;
        sum += term;
        abs_sum += term.abs();
    }
    if sum.abs() <= NON_GENERIC_TOL * abs_sum {
        return Err(Error::NonGenericSpectrum { sum });
    }
    Ok(Some(1.0 / sum))
}

/// Spectral weights for a given normalization constant,
///
///   P_s = (-1)^s Lambda / ((1 + lambda_s^2) prod_{t != s} |lambda_s - lambda_t|).
pub fn weights(spectrum: &InnerSpectrum, lambda_big: f64) -> Result<Vec<f64>> {
    if lambda_big == 0.0 || !lambda_big.is_finite() {
        return Err(Error::InvalidParameter {
            message: format!("Lambda = {lambda_big} must be nonzero and finite"),
        });
    }
    let lambdas = spectrum.lambdas();
    let mut out = Vec::with_capacity(lambdas.len());
    for (s, &ls) in lambdas.iter().enumerate() {
        let mut prod = 1.0 + ls * ls;
        for (t, &lt) in lambdas.iter().enumerate() {
            if t != s {
                prod *= (ls - lt).abs();
            }
        }
        let sign = if s % 2 == 0 { -1.0 } else { 1.0 };
        out.push(sign * lambda_big / prod);
    }
    Ok(out)
}

/// Metric signature of the realization: g_ss = (-1)^s sign(Lambda),
/// s counted from 1.
pub fn metric_signature(lambda_big: f64, n: usize) -> MetricSignature {
    let lead = if lambda_big >= 0.0 { 1i8 } else { -1i8 };
    let signs = (0..n).map(|s| if s % 2 == 0 { -lead } else { lead }).collect();
    MetricSignature::new(signs).expect("signs are +-1 by construction")
}

/// gamma11 = -sum_s lambda_s P_s.
pub fn gamma11(spectrum: &InnerSpectrum, weights: &[f64]) -> Result<f64> {
    let lambdas = spectrum.lambdas();
    if weights.len() != lambdas.len() {
        return Err(Error::DimensionMismatch { expected: lambdas.len(), got: weights.len() });
    }
    Ok(-lambdas.iter().zip(weights).map(|(&l, &p)| l * p).sum::<f64>())
}

/// Spectral sum sum_s (1 + lambda lambda_s) P_s / (lambda_s - lambda) in
/// double-double, returned together with nothing subtracted. Far above the
/// spectrum the terms are large and alternating while the physical content
/// is tiny, so plain f64 here would poison every consumer.
fn q_sum_dd(lambda: Complex64, lambdas: &[f64], weights: &[f64]) -> Result<DdC> {
    let lam = DdC::from_c64(lambda);
    let mut acc = DdC::ZERO;
    for (&ls, &ps) in lambdas.iter().zip(weights) {
        let den = DdC { re: Dd::from_f64(ls).sub(lam.re), im: lam.im.neg() };
        if den.is_zero() {
            return Err(Error::SpectralSingularity { lambda });
        }
        let num = lam.scale(Dd::from_f64(ls)).add(DdC::from_f64(1.0));
        acc = acc.add(num.scale(Dd::from_f64(ps)).div(den));
    }
    Ok(acc)
}

/// Q-function in spectral form,
/// Q(lambda) = sum_s (1 + lambda lambda_s)/(lambda_s - lambda) P_s.
/// Errors with `SpectralSingularity` exactly on the inner spectrum.
pub fn q_spectral(
    lambda: Complex64,
    spectrum: &InnerSpectrum,
    weights: &[f64],
) -> Result<Complex64> {
    let lambdas = spectrum.lambdas();
    if weights.len() != lambdas.len() {
        return Err(Error::DimensionMismatch { expected: lambdas.len(), got: weights.len() });
    }
    Ok(q_sum_dd(lambda, &lambdas, weights)?.value())
}

/// gamma11 - Q(lambda), the denominator of the fraction form of F and of
/// the amplitude formulas. With gamma11 = -sum_s lambda_s P_s folded into
/// the sum term by term,
///
///   gamma11 - Q = -sum_s P_s (1 + lambda_s^2)/(lambda_s - lambda),
///
/// which drops the separately rounded gamma11 scalar and one layer of
/// cancellation before the double-double accumulation even starts; the
/// remaining alternating sum is carried in double-double. Subtracting a
/// plain-f64 Q here instead would lose everything when |Q| >> |gamma11 - Q|.
pub(crate) fn q_denominator(
    lambda: Complex64,
    spectrum: &InnerSpectrum,
    weights: &[f64],
) -> Result<Complex64> {
    let lambdas = spectrum.lambdas();
    if weights.len() != lambdas.len() {
        return Err(Error::DimensionMismatch { expected: lambdas.len(), got: weights.len() });
    }
    let lam = DdC::from_c64(lambda);
    let mut acc = DdC::ZERO;
    for (&ls, &ps) in lambdas.iter().zip(weights) {
        let den = DdC { re: Dd::from_f64(ls).sub(lam.re), im: lam.im.neg() };
        if den.is_zero() {
            return Err(Error::SpectralSingularity { lambda });
        }
        let ls_dd = Dd::from_f64(ls);
        let num = Dd::from_f64(1.0).add(ls_dd.mul(ls_dd)).mul(Dd::from_f64(ps)).neg();
        acc = acc.add(DdC { re: num, im: Dd::ZERO }.div(den));
    }
    if acc.is_zero() {
        return Err(Error::VanishingDenominator { lambda });
    }
    Ok(acc.value())
}

/// Polynomial form of F at complex wave number,
/// F(k) = epsilon - gamma_coef prod_s (k_s^2 - k^2). For N = 0 the product
/// is empty and F reduces to the constant epsilon.
pub fn f_polynomial(k: Complex64, reduced: &ReducedParameters, spectrum: &InnerSpectrum) -> Complex64 {
    if spectrum.dim() == 0 {
        return Complex64::new(reduced.epsilon(), 0.0);
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for &ks in spectrum.ks() {
        prod *= Complex64::new(ks * ks, 0.0) - k * k;
    }
    Complex64::new(reduced.epsilon(), 0.0) - reduced.gamma_coef() * prod
}

/// Fraction form of F through the boundary parameters,
/// F(k) = 4 pi k0 (gamma00 - |gamma01|^2 / (gamma11 - Q((k/k0)^2))).
pub fn f_fraction(
    k: Complex64,
    ext: &ExtensionParameters,
    spectrum: &InnerSpectrum,
) -> Result<Complex64> {
    let k0 = spectrum.k0();
    let kk = k / k0;
    let lambda = kk * kk;
    let d = q_denominator(lambda, spectrum, ext.weights())?;
    Ok(FOUR_PI * k0 * (Complex64::new(ext.gamma00(), 0.0) - ext.gamma01_abs2() / d))
}

/// Taylor coefficients of F in u = k^2 up to `order` (inclusive):
/// F = sum_m g_m u^m with g_m the expansion of
/// epsilon - gamma_coef prod_s (k_s^2 - u).
pub fn taylor_coefficients(
    reduced: &ReducedParameters,
    spectrum: &InnerSpectrum,
    order: usize,
) -> Vec<f64> {
    let factors: Vec<(f64, f64)> = spectrum.ks().iter().map(|&k| (k * k, -1.0)).collect();
    let prod = crate::polynomial::expand_linear_factors(&factors);
    let mut out = vec![0.0; order + 1];
    for (m, slot) in out.iter_mut().enumerate() {
        let p = if m < prod.len() { prod[m] } else { 0.0 };
        *slot = -reduced.gamma_coef() * p;
    }
    out[0] += reduced.epsilon();
    out
}

/// Largest normalized residual of the Laurent-series conditions tying the
/// weights to the polynomial form: with q_s = (1 + lambda_s^2) P_s,
///
///   sum_s q_s lambda_s^(l-1) = 0                 for l = 1..N-1,
///   sum_s q_s lambda_s^(N-1) = (-1)^N Lambda,
///   sum_s lambda_s P_s       = -gamma11.
///
/// Each row is normalized by the sum of absolute values of its terms, so a
/// 10% corruption of one weight shows up at the 1e-2 level regardless of
/// scales.
pub fn laurent_residual(
    spectrum: &InnerSpectrum,
    weights: &[f64],
    lambda_big: f64,
    gamma11: f64,
) -> Result<f64> {
    let lambdas = spectrum.lambdas();
    let n = lambdas.len();
    if weights.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: weights.len() });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let q: Vec<f64> = lambdas.iter().zip(weights).map(|(&l, &p)| (1.0 + l * l) * p).collect();
    let mut worst: f64 = 0.0;
    for l in 1..=n {
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for (ls, qs) in lambdas.iter().zip(&q) {
            let term = qs * ls.powi(l as i32 - 1);
            sum += term;
            abs_sum += term.abs();
        }
        let target = if l < n {
            0.0
        } else if n % 2 == 0 {
            lambda_big
        } else {
            -lambda_big
        };
        abs_sum = abs_sum.max(target.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max((sum - target).abs() / abs_sum);
    }
    // gamma11 row.
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    for (ls, ps) in lambdas.iter().zip(weights) {
        let term = ls * ps;
        sum += term;
        abs_sum += term.abs();
    }
    abs_sum = abs_sum.max(gamma11.abs()).max(f64::MIN_POSITIVE);
    worst = worst.max((sum + gamma11).abs() / abs_sum);
    Ok(worst)
}
