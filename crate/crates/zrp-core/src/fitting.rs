//! Conversions between the three parameter pictures.
//!
//! Physical observables (scattering length a, effective radius r0, resonance
//! positions) pin the reduced polynomial parameters (a0, alpha) uniquely,
//! and those in turn pin the boundary-realization parameters up to the
//! gauge phase of gamma01. `ScatteringModel` bundles one consistent
//! instance of all three.

use serde::Serialize;

use crate::model::{
    self, ExtensionParameters, InnerSpectrum, ReducedParameters, FOUR_PI,
};
use crate::{Error, Result};

/// |epsilon * a| below this is treated as sitting on the manifold where the
/// bare length 1/|epsilon| diverges and no reduced parameter set exists.
pub const EPSILON_A_TOL: f64 = 1e-12;

/// Low-energy observables: scattering length, effective radius, and the
/// spectrum of resonance wave numbers they are to be fitted with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicalObservables {
    a: f64,
    r0: f64,
    spectrum: InnerSpectrum,
}

impl PhysicalObservables {
    pub fn new(a: f64, r0: f64, spectrum: InnerSpectrum) -> Result<Self> {
        if !a.is_finite() || a == 0.0 {
            return Err(Error::InvalidParameter {
                message: format!("scattering length a = {a} must be nonzero and finite"),
            });
        }
        if !r0.is_finite() {
            return Err(Error::InvalidParameter {
                message: format!("effective radius r0 = {r0} must be finite"),
            });
        }
        if spectrum.dim() == 0 && r0 != 0.0 {
            return Err(Error::InvalidParameter {
                message: format!(
                    "a structureless model (N = 0) has exactly zero effective radius, got r0 = {r0}"
                ),
            });
        }
        Ok(PhysicalObservables { a, r0, spectrum })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn spectrum(&self) -> &InnerSpectrum {
        &self.spectrum
    }
}

/// Invert the fit: observables -> reduced polynomial parameters.
///
/// With product shorthand over squared wave numbers,
///
///   gamma_coef = r0 / (2 sum_n prod_{t != n} k_t^2),
///   epsilon    = gamma_coef prod_s k_s^2 - 1/a,
///   a0 = -1/epsilon,  alpha = gamma_coef / a0^(2N-1).
///
/// Fails with `InvalidObservables` when |epsilon * a| < `EPSILON_A_TOL`:
/// there the bare length diverges and no finite (a0, alpha) exists. For
/// N = 0 it requires r0 = 0 (enforced by `PhysicalObservables`) and returns
/// a0 = a, alpha = 0.
pub fn reduce_observables(obs: &PhysicalObservables) -> Result<ReducedParameters> {
    let n = obs.spectrum.dim();
    if n == 0 {
        return ReducedParameters::new(obs.a, 0.0, 0);
    }
    let k2: Vec<f64> = obs.spectrum.ks().iter().map(|&k| k * k).collect();
    let mut sum_prods = 0.0;
    for skip in 0..n {
        let mut prod = 1.0;
        for (t, &v) in k2.iter().enumerate() {
            if t != skip {
                prod *= v;
            }
        }
        sum_prods += prod;
    }
    let gamma_coef = obs.r0 / (2.0 * sum_prods);
    let prod_all: f64 = k2.iter().product();
    let epsilon = gamma_coef * prod_all - 1.0 / obs.a;
    let product = (epsilon * obs.a).abs();
    if product < EPSILON_A_TOL {
        return Err(Error::InvalidObservables { epsilon, product });
    }
    let a0 = -1.0 / epsilon;
    let alpha = gamma_coef / a0.powi(2 * n as i32 - 1);
    ReducedParameters::new(a0, alpha, n)
}

/// Forward direction: reduced parameters -> observables.
///
///   1/a = gamma_coef prod_s k_s^2 - epsilon,
///   r0  = 2 gamma_coef sum_n prod_{t != n} k_t^2.
pub fn observables_from_reduced(
    reduced: &ReducedParameters,
    spectrum: &InnerSpectrum,
) -> Result<PhysicalObservables> {
    let n = spectrum.dim();
    if n == 0 {
        return PhysicalObservables::new(reduced.a0(), 0.0, spectrum.clone());
    }
    let k2: Vec<f64> = spectrum.ks().iter().map(|&k| k * k).collect();
    let prod_all: f64 = k2.iter().product();
    let inv_a = reduced.gamma_coef() * prod_all - reduced.epsilon();
    if inv_a == 0.0 || !inv_a.is_finite() {
        return Err(Error::InvalidParameter {
            message: format!(
                "reduced parameters give 1/a = {inv_a}; the scattering length is not finite and nonzero"
            ),
        });
    }
    let mut sum_prods = 0.0;
    for skip in 0..n {
        let mut prod = 1.0;
        for (t, &v) in k2.iter().enumerate() {
            if t != skip {
                prod *= v;
            }
        }
        sum_prods += prod;
    }
    let r0 = 2.0 * reduced.gamma_coef() * sum_prods;
    PhysicalObservables::new(1.0 / inv_a, r0, spectrum.clone())
}

/// Boundary-realization parameters from the reduced ones.
///
/// The canonical normalization constant fixes |Lambda|; its sign is copied
/// from gamma_coef so that |gamma01|^2 = gamma_coef k0^(2N-1) Lambda / 4 pi
/// comes out positive. Then
///
///   P_s from `model::weights`, g from `model::metric_signature`,
///   gamma11 = -sum lambda_s P_s, gamma00 = epsilon / (4 pi k0),
///   |e_s|^2 = |P_s|, e_norm = sum P_s.
///
/// Requires N >= 1 and gamma_coef != 0; a vanishing coupling has no inner
/// channel to parameterize.
pub fn extension_from_reduced(
    reduced: &ReducedParameters,
    spectrum: &InnerSpectrum,
) -> Result<ExtensionParameters> {
    let n = spectrum.dim();
    if n == 0 {
        return Err(Error::InvalidParameter {
            message: "a structureless model (N = 0) has no inner extension".into(),
        });
    }
    if reduced.gamma_coef() == 0.0 {
        return Err(Error::InvalidParameter {
            message: "gamma_coef = 0 (r0 = 0): the inner channel decouples and has no extension parameters"
                .into(),
        });
    }
    let lambda_norm = model::normalization_constant(spectrum)?
        .expect("N >= 1 spectra always have a normalization constant");
    let lambda_big = lambda_norm.abs() * reduced.gamma_coef().signum();
    let p = model::weights(spectrum, lambda_big)?;
    let metric = model::metric_signature(lambda_big, n);
    let g11 = model::gamma11(spectrum, &p)?;
    let k0 = spectrum.k0();
    let gamma00 = reduced.epsilon() / (FOUR_PI * k0);
    let gamma01_abs2 = reduced.gamma_coef() * k0.powi(2 * n as i32 - 1) * lambda_big / FOUR_PI;
    let e_abs2: Vec<f64> = p.iter().map(|&x| x.abs()).collect();
    let e_norm: f64 = p.iter().sum();
    ExtensionParameters::new(lambda_big, p, metric, e_abs2, gamma00, gamma01_abs2, g11, e_norm)
}

/// One consistent model: spectrum, observables, reduced parameters, and
/// (when the inner channel is coupled) the extension parameters.
#[derive(Debug, Clone, Serialize)]
pub struct ScatteringModel {
    spectrum: InnerSpectrum,
    observables: PhysicalObservables,
    reduced: ReducedParameters,
    extension: Option<ExtensionParameters>,
}

impl ScatteringModel {
    /// Build from observables. `k0` defaults to 1/|a0| (the inverse bare
    /// length is the natural wave-number scale of the realization); the
    /// reduction itself does not depend on k0.
    pub fn from_observables(a: f64, r0: f64, ks: Vec<f64>, k0: Option<f64>) -> Result<Self> {
        let provisional = InnerSpectrum::new(k0.unwrap_or(1.0), ks)?;
        let obs = PhysicalObservables::new(a, r0, provisional)?;
        let reduced = reduce_observables(&obs)?;
        let spectrum = match k0 {
            Some(_) => obs.spectrum().clone(),
            None => InnerSpectrum::new(1.0 / reduced.a0().abs(), obs.spectrum().ks().to_vec())?,
        };
        let observables = PhysicalObservables::new(a, r0, spectrum.clone())?;
        let extension = if spectrum.dim() >= 1 && reduced.gamma_coef() != 0.0 {
            Some(extension_from_reduced(&reduced, &spectrum)?)
        } else {
            None
        };
        Ok(ScatteringModel { spectrum, observables, reduced, extension })
    }

    /// Build from reduced parameters; same k0 defaulting.
    pub fn from_reduced(a0: f64, alpha: f64, ks: Vec<f64>, k0: Option<f64>) -> Result<Self> {
        let n = ks.len();
        let reduced = ReducedParameters::new(a0, alpha, n)?;
        let spectrum = InnerSpectrum::new(k0.unwrap_or(1.0 / a0.abs()), ks)?;
        let observables = observables_from_reduced(&reduced, &spectrum)?;
        let extension = if n >= 1 && reduced.gamma_coef() != 0.0 {
            Some(extension_from_reduced(&reduced, &spectrum)?)
        } else {
            None
        };
        Ok(ScatteringModel { spectrum, observables, reduced, extension })
    }

    /// Assemble from already-computed parts. The parts are trusted to be
    /// mutually consistent apart from dimension checks; this is the entry
    /// point for diagnostic experiments with deliberately perturbed data.
    pub fn from_parts(
        spectrum: InnerSpectrum,
        observables: PhysicalObservables,
        reduced: ReducedParameters,
        extension: Option<ExtensionParameters>,
    ) -> Result<Self> {
        if let Some(ext) = &extension {
            if ext.weights().len() != spectrum.dim() {
                return Err(Error::DimensionMismatch {
                    expected: spectrum.dim(),
                    got: ext.weights().len(),
                });
            }
        }
        Ok(ScatteringModel { spectrum, observables, reduced, extension })
    }

    pub fn spectrum(&self) -> &InnerSpectrum {
        &self.spectrum
    }

    pub fn observables(&self) -> &PhysicalObservables {
        &self.observables
    }

    pub fn reduced(&self) -> &ReducedParameters {
        &self.reduced
    }

    pub fn extension(&self) -> Option<&ExtensionParameters> {
        self.extension.as_ref()
    }

    /// Number of inner resonances N.
    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    /// Scattering data at real wave number k.
    pub fn evaluate(&self, k: f64) -> Result<crate::scattering::ScatteringPoint> {
        crate::scattering::evaluate(k, &self.reduced, &self.spectrum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flagship_chain() {
        // a = 1, r0 = 1, k_1 = 1, k0 = 1:
        // gamma_coef = 1/2, epsilon = 1/2 - 1 = -1/2, a0 = 2, alpha = 1/4.
        let m = ScatteringModel::from_observables(1.0, 1.0, vec![1.0], Some(1.0)).unwrap();
        let r = m.reduced();
        assert!((r.a0() - 2.0).abs() < 1e-15);
        assert!((r.alpha() - 0.25).abs() < 1e-15);
        assert!((r.epsilon() + 0.5).abs() < 1e-15);
        assert!((r.gamma_coef() - 0.5).abs() < 1e-15);

        let ext = m.extension().unwrap();
        assert!((ext.lambda_big() - 2.0).abs() < 1e-13);
        assert!((ext.weights()[0] + 1.0).abs() < 1e-13);
        assert_eq!(ext.metric().signs(), &[-1]);
        assert!((ext.gamma11() - 1.0).abs() < 1e-13);
        assert!((ext.gamma00() + 1.0 / (8.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!((ext.gamma01_abs2() - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!((ext.e_norm() + 1.0).abs() < 1e-13);
        assert!((ext.e_abs2()[0] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn negative_r0_flips_lambda_sign() {
        // a = 1, r0 = -1, k_1 = 1: gamma_coef = -1/2, epsilon = -3/2,
        // a0 = 2/3, alpha = gamma_coef / a0 = -3/4, Lambda = -2, P = (+1),
        // g = (+1), e_norm = +1.
        let m = ScatteringModel::from_observables(1.0, -1.0, vec![1.0], Some(1.0)).unwrap();
        let r = m.reduced();
        assert!((r.gamma_coef() + 0.5).abs() < 1e-15);
        assert!((r.epsilon() + 1.5).abs() < 1e-15);
        assert!((r.a0() - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.alpha() + 0.75).abs() < 1e-14);
        let ext = m.extension().unwrap();
        assert!((ext.lambda_big() + 2.0).abs() < 1e-13);
        assert!((ext.weights()[0] - 1.0).abs() < 1e-13);
        assert_eq!(ext.metric().signs(), &[1]);
        assert!((ext.e_norm() - 1.0).abs() < 1e-13);
        // |gamma01|^2 stays positive by the sign convention for Lambda.
        assert!(ext.gamma01_abs2() > 0.0);
    }

    #[test]
    fn two_resonance_extension() {
        // lambda = (1, 2) with positive coupling: Lambda = +10/3,
        // g = (-1, +1), P = (-5/3, 2/3), e_norm = -1.
        let s = InnerSpectrum::new(1.0, vec![1.0, 2.0f64.sqrt()]).unwrap();
        let r = ReducedParameters::new(2.0, 0.1, 2).unwrap();
        assert!(r.gamma_coef() > 0.0);
        let ext = extension_from_reduced(&r, &s).unwrap();
        assert!((ext.lambda_big() - 10.0 / 3.0).abs() < 1e-12);
        assert_eq!(ext.metric().signs(), &[-1, 1]);
        assert!((ext.weights()[0] + 5.0 / 3.0).abs() < 1e-12);
        assert!((ext.weights()[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((ext.e_norm() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn epsilon_zero_manifold_is_rejected() {
        // a = 2, r0 = 1, k_1 = 1: gamma_coef = 1/2, epsilon = 1/2 - 1/2 = 0.
        let err = ScatteringModel::from_observables(2.0, 1.0, vec![1.0], Some(1.0)).unwrap_err();
        match err {
            Error::InvalidObservables { epsilon, product } => {
                assert!(epsilon.abs() < 1e-15);
                assert!(product < 1e-12);
            }
            other => panic!("expected InvalidObservables, got {other:?}"),
        }
    }

    #[test]
    fn observables_from_reduced_hand_example() {
        // a0 = -2, alpha = 1/4, k = (1): gamma_coef = alpha * a0 = -1/2,
        // epsilon = 1/2, 1/a = -1/2 - 1/2 = -1 -> a = -1, r0 = -1.
        let s = InnerSpectrum::new(1.0, vec![1.0]).unwrap();
        let r = ReducedParameters::new(-2.0, 0.25, 1).unwrap();
        let obs = observables_from_reduced(&r, &s).unwrap();
        assert!((obs.a() + 1.0).abs() < 1e-14);
        assert!((obs.r0() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn round_trip_flagship() {
        let m = ScatteringModel::from_observables(1.0, 1.0, vec![1.0], Some(1.0)).unwrap();
        let back = observables_from_reduced(m.reduced(), m.spectrum()).unwrap();
        assert!((back.a() - 1.0).abs() < 1e-14);
        assert!((back.r0() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn n_zero_model() {
        let m = ScatteringModel::from_observables(1.0, 0.0, vec![], None).unwrap();
        assert_eq!(m.dim(), 0);
        assert!(m.extension().is_none());
        assert_eq!(m.reduced().a0(), 1.0);
        assert_eq!(m.reduced().alpha(), 0.0);
        // Default k0 = 1/|a0|.
        assert_eq!(m.spectrum().k0(), 1.0);
        // Nonzero r0 cannot be fitted without inner structure.
        assert!(ScatteringModel::from_observables(1.0, 0.5, vec![], None).is_err());
    }

    #[test]
    fn coupled_model_without_r0_has_no_extension() {
        // r0 = 0 with N = 1: gamma_coef = 0, the channel decouples; the
        // model is still usable through the polynomial form.
        let m = ScatteringModel::from_observables(1.0, 0.0, vec![1.0], Some(1.0)).unwrap();
        assert!(m.extension().is_none());
        let s = m.spectrum().clone();
        let r = *m.reduced();
        assert!(matches!(extension_from_reduced(&r, &s), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn default_k0_is_inverse_bare_length() {
        let m = ScatteringModel::from_observables(1.0, 1.0, vec![1.0], None).unwrap();
        // a0 = 2 -> k0 = 1/2.
        assert!((m.spectrum().k0() - 0.5).abs() < 1e-15);
        // The reduction is k0-independent.
        assert!((m.reduced().a0() - 2.0).abs() < 1e-15);
    }
}
