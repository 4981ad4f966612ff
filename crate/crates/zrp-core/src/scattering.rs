//! Observable quantities on the real half-line k >= 0: phase shift,
//! S-matrix, scattering amplitude and cross section from the polynomial form
//! of F, plus the transition amplitudes computed through the boundary
//! parameters and the identity tying the two pictures together.

use num_complex::Complex64;
use serde::Serialize;

use crate::model::{
    self, ExtensionParameters, InnerSpectrum, ReducedParameters, FOUR_PI,
};
use crate::{Error, Result};

/// The closed-form and linear-solve amplitude routes are pure algebraic
/// rearrangements of each other; disagreement beyond this relative level
/// means the inputs are inconsistent, not that rounding piled up.
pub const AMPLITUDE_DUAL_TOL: f64 = 1e-11;

/// Everything the sweep reports at one wave number. `delta` is the
/// principal phase in (-pi/2, pi/2]; sequential unwrapping is a property of
/// a grid, not of a point, so it lives in `unwrap_phases`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScatteringPoint {
    k: f64,
    #[serde(rename = "F")]
    k_cot_delta: f64,
    delta: f64,
    #[serde(rename = "S")]
    s_matrix: Complex64,
    #[serde(rename = "f")]
    amplitude: Complex64,
    sigma: f64,
}

impl ScatteringPoint {
    pub fn k(&self) -> f64 {
        self.k
    }

    /// F(k) = k cot(delta).
    pub fn k_cot_delta(&self) -> f64 {
        self.k_cot_delta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn s_matrix(&self) -> Complex64 {
        self.s_matrix
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Copy with the phase replaced by an unwrapped value.
    pub(crate) fn with_delta(self, delta: f64) -> ScatteringPoint {
        ScatteringPoint { delta, ..self }
    }
}

/// Scattering data at real k >= 0, built from the polynomial form:
/// f = 1/(F - ik), S = 1 + 2ik f, sigma = 4 pi |f|^2, delta folded into
/// (-pi/2, pi/2]. At k = 0 these limits degenerate smoothly to f = -a,
/// S = 1, sigma = 4 pi a^2, delta = 0 through the same expressions.
pub fn evaluate(
    k: f64,
    reduced: &ReducedParameters,
    spectrum: &InnerSpectrum,
) -> Result<ScatteringPoint> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::InvalidParameter {
            message: format!("wave number k = {k} must be finite and >= 0"),
        });
    }
    let f_cot = model::f_polynomial(Complex64::new(k, 0.0), reduced, spectrum).re;
    let amplitude = Complex64::new(1.0, 0.0) / Complex64::new(f_cot, -k);
    let s_matrix = Complex64::new(1.0, 0.0) + Complex64::new(0.0, 2.0 * k) * amplitude;
    let sigma = FOUR_PI * amplitude.norm_sqr();
    let delta = principal_phase(k, f_cot);
    Ok(ScatteringPoint { k, k_cot_delta: f_cot, delta, s_matrix, amplitude, sigma })
}

/// Principal branch of delta = atan2(k, F) folded into (-pi/2, pi/2].
fn principal_phase(k: f64, f_cot: f64) -> f64 {
    let mut d = k.atan2(f_cot);
    if d > std::f64::consts::FRAC_PI_2 {
        d -= std::f64::consts::PI;
    }
    d
}

/// Sequentially unwrap a grid of principal phases: each value is shifted by
/// the multiple of pi that brings it closest to its predecessor, making the
/// curve continuous through resonances.
pub fn unwrap_phases(deltas: &mut [f64]) {
    for i in 1..deltas.len() {
        let shift = ((deltas[i - 1] - deltas[i]) / std::f64::consts::PI).round();
        deltas[i] += shift * std::f64::consts::PI;
    }
}

/// Cross section exactly at the s-th resonance (1-based):
/// sigma(k_s) = 4 pi a0^2 / (1 + a0^2 k_s^2), the Wigner form evaluated with
/// the bare scattering length — the product term of F vanishes there.
pub fn resonance_cross_section(
    s: usize,
    reduced: &ReducedParameters,
    spectrum: &InnerSpectrum,
) -> Result<f64> {
    if s == 0 || s > spectrum.dim() {
        return Err(Error::IndexOutOfRange { index: s, len: spectrum.dim() });
    }
    let ks = spectrum.ks()[s - 1];
    let a0 = reduced.a0();
    Ok(FOUR_PI * a0 * a0 / (1.0 + a0 * a0 * ks * ks))
}

/// Closed form of the cross section through the reduced parameters,
///
///   sigma = 4 pi a0^2 / (1 + a0^2 k^2 + 2G + G^2),
///   G = alpha prod_s (a0^2 k_s^2 - a0^2 k^2),
///
/// kept as an independent route for testing `evaluate`.
pub fn sigma_explicit(k: f64, reduced: &ReducedParameters, spectrum: &InnerSpectrum) -> f64 {
    let a0 = reduced.a0();
    let mut g = reduced.alpha();
    for &ks in spectrum.ks() {
        g *= a0 * a0 * ks * ks - a0 * a0 * k * k;
    }
    if spectrum.dim() == 0 {
        g = 0.0;
    }
    FOUR_PI * a0 * a0 / (1.0 + a0 * a0 * k * k + 2.0 * g + g * g)
}

/// Transition amplitudes (T, T_E) of the coupled system at real k.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AmplitudePair {
    #[serde(rename = "T")]
    t: Complex64,
    #[serde(rename = "T_E")]
    t_e: Complex64,
}

impl AmplitudePair {
    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn t_e(&self) -> Complex64 {
        self.t_e
    }
}

/// Solve for the amplitudes twice — closed form
///
///   T   = 1 / (gamma00 - |gamma01|^2/(gamma11 - Q) - i sqrt(lambda)/4 pi),
///   T_E = gamma10 / (Q - gamma11) * T,
///
/// and Cramer's rule on the 2x2 system
///
///   [gamma00 - i sqrt(lambda)/4pi, gamma10; gamma10, gamma11 - Q] (T, T_E) = (1, 0),
///
/// with lambda = (k/k0)^2 — and require both to agree to
/// `AMPLITUDE_DUAL_TOL` before returning the closed-form pair. Errors on the
/// inner spectrum, where Q has poles.
pub fn amplitudes(
    k: f64,
    ext: &ExtensionParameters,
    spectrum: &InnerSpectrum,
) -> Result<AmplitudePair> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::InvalidParameter {
            message: format!("wave number k = {k} must be finite and >= 0"),
        });
    }
    let k0 = spectrum.k0();
    let sqrt_lambda = k / k0;
    let lambda = Complex64::new(sqrt_lambda * sqrt_lambda, 0.0);
    let d = model::q_denominator(lambda, spectrum, ext.weights())?;
    let gamma10 = ext.gamma10();

    let corner = Complex64::new(ext.gamma00(), -sqrt_lambda / FOUR_PI);
    let denom_t = corner - ext.gamma01_abs2() / d;
    if denom_t.norm() == 0.0 {
        return Err(Error::SingularAmplitudeSystem { det: denom_t });
    }
    let t = 1.0 / denom_t;
    let t_e = -(gamma10 / d) * t;

    // Independent route: Cramer on the full 2x2 system.
    let det = corner * d - gamma10 * gamma10;
    if det.norm() == 0.0 {
        return Err(Error::SingularAmplitudeSystem { det });
    }
    let t_lin = d / det;
    let t_e_lin = -gamma10 / det;
    let scale = (t.norm() + t_e.norm()).max(1.0);
    let residual = ((t - t_lin).norm() + (t_e - t_e_lin).norm()) / scale;
    if residual > AMPLITUDE_DUAL_TOL {
        return Err(Error::DualRouteMismatch { context: "amplitudes", residual });
    }
    Ok(AmplitudePair { t, t_e })
}

/// Residual of the boundary identity 4 pi / T + i sqrt(lambda) = F(k)/k0 at
/// real k. For an uncoupled model (no extension parameters) T collapses to
/// the structureless form 1/(gamma00 - i sqrt(lambda)/4 pi) with
/// gamma00 = epsilon/(4 pi k0), and the identity is exact by construction.
pub fn boundary_identity_residual(
    k: f64,
    ext: Option<&ExtensionParameters>,
    reduced: &ReducedParameters,
    spectrum: &InnerSpectrum,
) -> Result<f64> {
    let k0 = spectrum.k0();
    let sqrt_lambda = k / k0;
    let t = match ext {
        Some(e) => amplitudes(k, e, spectrum)?.t(),
        None => {
            let gamma00 = reduced.epsilon() / (FOUR_PI * k0);
            1.0 / Complex64::new(gamma00, -sqrt_lambda / FOUR_PI)
        }
    };
    let lhs = FOUR_PI / t + Complex64::new(0.0, sqrt_lambda);
    let rhs = model::f_polynomial(Complex64::new(k, 0.0), reduced, spectrum) / k0;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::ScatteringModel;

    const PI: f64 = std::f64::consts::PI;

    fn flagship() -> ScatteringModel {
        ScatteringModel::from_observables(1.0, 1.0, vec![1.0], Some(1.0)).unwrap()
    }

    #[test]
    fn flagship_point_at_k_one() {
        // F(1) = -1/2, f = 1/(-1/2 - i) = (-1/2 + i)/(5/4),
        // sigma = 4 pi / (5/4) = 16 pi / 5, S = (-3 - 4i)/5.
        let m = flagship();
        let p = m.evaluate(1.0).unwrap();
        assert!((p.k_cot_delta() + 0.5).abs() < 1e-14);
        let f_expect = Complex64::new(-0.4, 0.8);
        assert!((p.amplitude() - f_expect).norm() < 1e-14);
        assert!((p.sigma() - 16.0 * PI / 5.0).abs() < 1e-13);
        let s_expect = Complex64::new(-0.6, -0.8);
        assert!((p.s_matrix() - s_expect).norm() < 1e-14);
        assert!((p.s_matrix().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_energy_limit() {
        let m = flagship();
        let p = m.evaluate(0.0).unwrap();
        assert!((p.amplitude() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((p.s_matrix() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((p.sigma() - 4.0 * PI).abs() < 1e-13);
        assert_eq!(p.delta(), 0.0);
    }

    #[test]
    fn negative_k_is_rejected() {
        let m = flagship();
        assert!(matches!(m.evaluate(-1.0), Err(Error::InvalidParameter { .. })));
        assert!(m.evaluate(f64::NAN).is_err());
    }

    #[test]
    fn principal_phase_is_folded() {
        // F < 0 at small k for the flagship: atan2 gives an angle above
        // pi/2, which must fold back into (-pi/2, pi/2].
        let m = flagship();
        let p = m.evaluate(0.1).unwrap();
        assert!(p.delta() > -PI / 2.0 && p.delta() <= PI / 2.0);
        // tan(delta) must still reproduce k/F.
        let expect_tan = 0.1 / p.k_cot_delta();
        assert!((p.delta().tan() - expect_tan).abs() < 1e-12);
    }

    #[test]
    fn unwrap_makes_phases_continuous() {
        let m = flagship();
        let num = 400;
        let mut deltas: Vec<f64> = (0..num)
            .map(|i| m.evaluate(0.01 + 2.5 * i as f64 / (num - 1) as f64).unwrap().delta())
            .collect();
        unwrap_phases(&mut deltas);
        for w in deltas.windows(2) {
            assert!((w[1] - w[0]).abs() < 0.5, "jump {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn sigma_matches_explicit_form() {
        let m = ScatteringModel::from_observables(-1.4, 0.6, vec![0.9, 2.1], Some(0.8)).unwrap();
        for &k in &[0.0, 0.35, 0.9, 1.7, 4.2] {
            let p = m.evaluate(k).unwrap();
            let o = sigma_explicit(k, m.reduced(), m.spectrum());
            assert!(
                (p.sigma() - o).abs() < 1e-10 * o.max(1e-10),
                "k = {k}: {} vs {}",
                p.sigma(),
                o
            );
        }
    }

    #[test]
    fn resonance_cross_section_hand_value() {
        let m = flagship();
        // a0 = 2, k_1 = 1: sigma = 16 pi / 5. Same as evaluate(1.0).
        let s = resonance_cross_section(1, m.reduced(), m.spectrum()).unwrap();
        assert!((s - 16.0 * PI / 5.0).abs() < 1e-13);
        let p = m.evaluate(1.0).unwrap();
        assert!((s - p.sigma()).abs() < 1e-12);
        assert!(matches!(
            resonance_cross_section(2, m.reduced(), m.spectrum()),
            Err(Error::IndexOutOfRange { index: 2, len: 1 })
        ));
        assert!(resonance_cross_section(0, m.reduced(), m.spectrum()).is_err());
    }

    #[test]
    fn flagship_amplitudes_at_zero() {
        // Q(0) = -1, gamma11 - Q = 2; T = 1/(-1/8pi - (1/4pi)/2) = -4 pi,
        // T_E = gamma10/(Q - gamma11) T = sqrt(pi).
        let m = flagship();
        let ext = m.extension().unwrap();
        let a = amplitudes(0.0, ext, m.spectrum()).unwrap();
        assert!((a.t() - Complex64::new(-FOUR_PI, 0.0)).norm() < 1e-12);
        assert!((a.t_e() - Complex64::new(PI.sqrt(), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn amplitudes_error_exactly_on_resonance() {
        let m = flagship();
        let ext = m.extension().unwrap();
        assert!(matches!(
            amplitudes(1.0, ext, m.spectrum()),
            Err(Error::SpectralSingularity { .. })
        ));
    }

    #[test]
    fn boundary_identity_on_a_grid() {
        let m = ScatteringModel::from_observables(1.3, -0.4, vec![0.8, 1.9], Some(1.1)).unwrap();
        let ext = m.extension();
        for i in 0..60 {
            let k = 0.03 + 5.0 * i as f64 / 59.0;
            if m.spectrum().ks().iter().any(|&ks| (k - ks).abs() < 1e-6) {
                continue;
            }
            let res = boundary_identity_residual(k, ext, m.reduced(), m.spectrum()).unwrap();
            let scale =
                (model::f_polynomial(Complex64::new(k, 0.0), m.reduced(), m.spectrum()).norm()
                    / m.spectrum().k0())
                .max(1e-12);
            assert!(res < 1e-10 * scale, "k = {k}: residual {res:.3e} vs scale {scale:.3e}");
        }
    }

    #[test]
    fn boundary_identity_structureless() {
        let m = ScatteringModel::from_observables(-0.7, 0.0, vec![], None).unwrap();
        for &k in &[0.0, 0.4, 2.0, 9.0] {
            let res = boundary_identity_residual(k, None, m.reduced(), m.spectrum()).unwrap();
            assert!(res < 1e-13, "k = {k}: {res:.3e}");
        }
    }

    #[test]
    fn s_matrix_unitary_on_grid() {
        let m = ScatteringModel::from_observables(2.2, 1.1, vec![0.5, 1.4, 3.3], Some(1.0)).unwrap();
        for i in 0..200 {
            let k = 10.0 * i as f64 / 199.0;
            let p = m.evaluate(k).unwrap();
            assert!((p.s_matrix().norm() - 1.0).abs() < 1e-13, "k = {k}");
            // Optical theorem: Im f = k |f|^2.
            let f = p.amplitude();
            assert!(
                (f.im - k * f.norm_sqr()).abs() < 1e-12 * f.norm().max(1e-6),
                "optical theorem at k = {k}"
            );
        }
    }
}
