//! S-matrix poles and zeros in the complex wave-number plane and their
//! physical classification.
//!
//! Poles solve F(k) = ik. Substituting k = i kappa turns that into a real
//! polynomial in kappa,
//!
//!   P(kappa) = gamma_coef prod_s (k_s^2 + kappa^2) - kappa + (gamma_coef prod_s k_s^2 - epsilon),
//!
//! whose constant term equals 1/a. Zeros solve F(k) = -ik, whose kappa
//! polynomial differs by flipping the sign of every odd power; both sets are
//! found independently and then checked against the mirror relation
//! zeros = conj(poles).

use num_complex::Complex64;
use serde::Serialize;

use crate::model::{self, ExtensionParameters, InnerSpectrum, ReducedParameters, FOUR_PI};
use crate::polynomial::{self, PolishedRoot};
use crate::{Error, Result};

/// Pairwise kappa-distance below which roots are merged into one record
/// with multiplicity, relative to the largest root magnitude (floored at 1).
pub const CLUSTER_TOL: f64 = 1e-6;

/// A pole is placed on the imaginary axis when |Re k| < 1e-9 |k| + 1e-12;
/// the absolute floor keeps the test meaningful near the origin.
fn axis_tol(k: Complex64) -> f64 {
    1e-9 * k.norm() + 1e-12
}

/// Physical character of an S-matrix pole at k = p + iq.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleKind {
    /// p = 0, q > 0: bound state with energy -scale q^2.
    Bound,
    /// p = 0, q < 0: virtual (antibound) state.
    Virtual,
    /// p > 0, q < 0: decaying resonance.
    Metastable,
    /// p < 0, q < 0: mirror partner of a metastable pole.
    Trapping,
    /// q > 0 with p != 0: an upper-half-plane off-axis pole. Such a pole
    /// violates the unitarity constraints of a physical S-matrix, so it is
    /// flagged rather than classified — the model parameters place a
    /// resonance outside the physical sheet.
    UnphysicalUpper,
}

/// One classified pole. Energies use E = scale * k^2 with scale the energy
/// unit (hbar^2 / 2 mu; 1 by default):
///
/// - `energy` is the full complex E,
/// - `energy_prime` = scale (p^2 - q^2) = Re E,
/// - `gamma_n` = -scale p q, the half-width parameter of the resonance peak
///    (positive exactly for metastable poles),
/// - `gamma_from_energy` = -2 Im E = -4 scale p q, the width read directly
///    off the imaginary part of the pole energy (= 4 gamma_n).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PoleRecord {
    pub k: Complex64,
    pub kappa: Complex64,
    pub kind: PoleKind,
    #[serde(rename = "E")]
    pub energy: Complex64,
    #[serde(rename = "E_prime")]
    pub energy_prime: f64,
    #[serde(rename = "Gamma_n")]
    pub gamma_n: f64,
    pub gamma_from_energy: f64,
    pub multiplicity: usize,
    /// For a trapping pole, index (into the report's pole list) of the
    /// metastable partner at -conj(k), when present.
    pub mirror_of: Option<usize>,
}

/// Coefficients (constant first) of the kappa polynomial for the poles.
/// The product expansion is accumulated in double-double; the constant term
/// gamma_coef prod k_s^2 - epsilon equals 1/a. Degree 2N for a coupled
/// model, 1 when the product term is absent (N = 0 or gamma_coef = 0).
pub fn pole_polynomial(reduced: &ReducedParameters, spectrum: &InnerSpectrum) -> Vec<f64> {
    let n = spectrum.dim();
    if n == 0 || reduced.gamma_coef() == 0.0 {
        return vec![-reduced.epsilon(), -1.0];
    }
    // prod_s (k_s^2 + x) with x = kappa^2.
    let factors: Vec<(f64, f64)> = spectrum.ks().iter().map(|&k| (k * k, 1.0)).collect();
    let even = polynomial::expand_linear_factors(&factors);
    let mut coeffs = vec![0.0; 2 * n + 1];
    for (m, &c) in even.iter().enumerate() {
        coeffs[2 * m] = reduced.gamma_coef() * c;
    }
    coeffs[1] -= 1.0;
    coeffs[0] -= reduced.epsilon();
    coeffs
}

/// Same polynomial for the zeros of S: flip the sign of every odd power
/// (kappa -> -kappa up to overall sign).
pub fn zero_polynomial(reduced: &ReducedParameters, spectrum: &InnerSpectrum) -> Vec<f64> {
    let mut coeffs = pole_polynomial(reduced, spectrum);
    for (i, c) in coeffs.iter_mut().enumerate() {
        if i % 2 == 1 {
            *c = -*c;
        }
    }
    coeffs
}

/// Root set of a kappa polynomial: clustered representatives with
/// multiplicities, plus per-seed polish diagnostics.
struct KappaRoots {
    clustered: Vec<(Complex64, usize)>,
    polish: Vec<PolishedRoot>,
}

fn kappa_roots(coeffs: &[f64]) -> KappaRoots {
    let seeds = polynomial::companion_roots(coeffs);
    let polish: Vec<PolishedRoot> = seeds.iter().map(|&s| polynomial::polish(coeffs, s)).collect();
    let roots: Vec<Complex64> = polish.iter().map(|p| p.root).collect();
    let scale = roots.iter().map(|r| r.norm()).fold(1.0f64, f64::max);
    let clustered = polynomial::cluster(&roots, CLUSTER_TOL * scale);
    KappaRoots { clustered, polish }
}

fn kappa_to_k(kappa: Complex64) -> Complex64 {
    // k = i kappa.
    Complex64::new(-kappa.im, kappa.re)
}

fn expand_with_multiplicity(clustered: &[(Complex64, usize)]) -> Vec<Complex64> {
    let mut out = Vec::new();
    for &(kappa, m) in clustered {
        for _ in 0..m {
            out.push(kappa_to_k(kappa));
        }
    }
    polynomial::sort_complex(&mut out);
    out
}

/// All pole positions k (multiplicity expanded, sorted by real then
/// imaginary part): 2N roots for a coupled model, 1 otherwise.
pub fn find_poles(reduced: &ReducedParameters, spectrum: &InnerSpectrum) -> Vec<Complex64> {
    expand_with_multiplicity(&kappa_roots(&pole_polynomial(reduced, spectrum)).clustered)
}

/// All zero positions of S (multiplicity expanded, sorted), computed from
/// their own polynomial rather than by conjugating the poles.
pub fn find_zeros(reduced: &ReducedParameters, spectrum: &InnerSpectrum) -> Vec<Complex64> {
    expand_with_multiplicity(&kappa_roots(&zero_polynomial(reduced, spectrum)).clustered)
}

/// Classify clustered poles. `energy_scale` is the factor in E = scale k^2.
pub fn classify(poles: &[(Complex64, usize)], energy_scale: f64) -> Vec<PoleRecord> {
    let mut records: Vec<PoleRecord> = poles
        .iter()
        .map(|&(kappa, multiplicity)| {
            let k_raw = kappa_to_k(kappa);
            let tol = axis_tol(k_raw);
            // Snap numerically-on-axis poles onto the axis so the derived
            // energies are exactly real.
            let k = if k_raw.re.abs() <= tol { Complex64::new(0.0, k_raw.im) } else { k_raw };
            let (p, q) = (k.re, k.im);
            let kind = if p == 0.0 {
                if q >= 0.0 {
                    PoleKind::Bound
                } else {
                    PoleKind::Virtual
                }
            } else if q < 0.0 {
                if p > 0.0 {
                    PoleKind::Metastable
                } else {
                    PoleKind::Trapping
                }
            } else {
                PoleKind::UnphysicalUpper
            };
            let energy = energy_scale * k * k;
            let energy_prime = energy_scale * (p * p - q * q);
            let off_axis = p != 0.0;
            let gamma_n = if off_axis { -energy_scale * p * q } else { 0.0 };
            let gamma_from_energy = if off_axis { -4.0 * energy_scale * p * q } else { 0.0 };
            PoleRecord {
                k,
                kappa,
                kind,
                energy,
                energy_prime,
                gamma_n,
                gamma_from_energy,
                multiplicity,
                mirror_of: None,
            }
        })
        .collect();

    // Link each trapping pole to its metastable mirror partner at -conj(k).
    for i in 0..records.len() {
        if records[i].kind != PoleKind::Trapping {
            continue;
        }
        let mirror = Complex64::new(-records[i].k.re, records[i].k.im);
        let tol = axis_tol(records[i].k).max(1e-9 * records[i].k.norm());
        records[i].mirror_of = records
            .iter()
            .position(|r| r.kind == PoleKind::Metastable && (r.k - mirror).norm() <= tol.max(1e-9));
    }
    records
}

/// Full pole/zero analysis of one model.
#[derive(Debug, Clone, Serialize)]
pub struct PoleZeroReport {
    pub poles: Vec<PoleRecord>,
    pub zeros: Vec<Complex64>,
    /// Per pole (multiplicity expanded): distance from conj(pole) to the
    /// nearest zero. The mirror property makes these vanish.
    pub symmetry_residuals: Vec<f64>,
    pub max_symmetry_residual: f64,
    pub pole_polish: Vec<PolishedRoot>,
    pub zero_polish: Vec<PolishedRoot>,
}

pub fn pole_zero_report(
    reduced: &ReducedParameters,
    spectrum: &InnerSpectrum,
    energy_scale: f64,
) -> Result<PoleZeroReport> {
    if !(energy_scale.is_finite() && energy_scale > 0.0) {
        return Err(Error::InvalidParameter {
            message: format!("energy scale {energy_scale} must be positive and finite"),
        });
    }
    let pk = kappa_roots(&pole_polynomial(reduced, spectrum));
    let zk = kappa_roots(&zero_polynomial(reduced, spectrum));
    let poles = classify(&pk.clustered, energy_scale);
    let zeros = expand_with_multiplicity(&zk.clustered);
    let pole_positions = expand_with_multiplicity(&pk.clustered);
    let symmetry_residuals = polynomial::conjugate_match_distances(&pole_positions, &zeros);
    let max_symmetry_residual = symmetry_residuals.iter().copied().fold(0.0f64, f64::max);
    Ok(PoleZeroReport {
        poles,
        zeros,
        symmetry_residuals,
        max_symmetry_residual,
        pole_polish: pk.polish,
        zero_polish: zk.polish,
    })
}

/// Residual of the dispersion equation at a bound-state pole k = i kappa
/// (kappa > 0): the pole of T requires
///
///   i sqrt(lambda)/4 pi = gamma00 - |gamma01|^2 / (gamma11 - Q(lambda)),
///
/// at lambda = (k/k0)^2 = -(kappa/k0)^2, where the branch sqrt(lambda) =
/// i kappa/k0 keeps Im sqrt >= 0. Without extension parameters the Q term
/// is absent.
pub fn dispersion_residual(
    k_pole: Complex64,
    ext: Option<&ExtensionParameters>,
    reduced: &ReducedParameters,
    spectrum: &InnerSpectrum,
) -> Result<f64> {
    let k0 = spectrum.k0();
    let kk = k_pole / k0;
    let lambda = kk * kk;
    // Branch with Im sqrt(lambda) >= 0.
    let mut root = lambda.sqrt();
    if root.im < 0.0 {
        root = -root;
    }
    let lhs = Complex64::new(0.0, 1.0) * root / FOUR_PI;
    let gamma00 = match ext {
        Some(e) => e.gamma00(),
        None => reduced.epsilon() / (FOUR_PI * k0),
    };
    let rhs = match ext {
        Some(e) => {
            let d = model::q_denominator(lambda, spectrum, e.weights())?;
            Complex64::new(gamma00, 0.0) - e.gamma01_abs2() / d
        }
        None => Complex64::new(gamma00, 0.0),
    };
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fitting::ScatteringModel;

    fn model(a: f64, r0: f64, ks: &[f64]) -> ScatteringModel {
        ScatteringModel::from_observables(a, r0, ks.to_vec(), Some(1.0)).unwrap()
    }

    #[test]
    fn structureless_pole_polynomial() {
        // N = 0, a = 1: P(kappa) = -kappa + 1, root kappa = 1, pole k = i.
        let m = ScatteringModel::from_observables(1.0, 0.0, vec![], Some(1.0)).unwrap();
        let coeffs = pole_polynomial(m.reduced(), m.spectrum());
        assert_eq!(coeffs, vec![1.0, -1.0]);
        let poles = find_poles(m.reduced(), m.spectrum());
        assert_eq!(poles.len(), 1);
        assert!((poles[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn flagship_pole_coefficients_and_roots() {
        // a = 1, r0 = 1, k_1 = 1: P(kappa) = kappa^2/2 - kappa + 1,
        // roots kappa = 1 +- i, poles k = -+1 + i: upper-half off-axis pair.
        let m = model(1.0, 1.0, &[1.0]);
        let coeffs = pole_polynomial(m.reduced(), m.spectrum());
        assert_eq!(coeffs.len(), 3);
        assert!((coeffs[0] - 1.0).abs() < 1e-15);
        assert!((coeffs[1] + 1.0).abs() < 1e-15);
        assert!((coeffs[2] - 0.5).abs() < 1e-15);
        let poles = find_poles(m.reduced(), m.spectrum());
        assert_eq!(poles.len(), 2);
        assert!((poles[0] - Complex64::new(-1.0, 1.0)).norm() < 1e-10);
        assert!((poles[1] - Complex64::new(1.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn shifted_observables_give_split_real_kappa_pair() {
        // a = 4, r0 = 1, k_1 = 1: P = kappa^2/2 - kappa + 1/4,
        // kappa = 1 -+ 1/sqrt(2): two virtual-side poles on the axis.
        let m = model(4.0, 1.0, &[1.0]);
        let poles = find_poles(m.reduced(), m.spectrum());
        assert_eq!(poles.len(), 2);
        let r = 0.5f64.sqrt();
        assert!((poles[0] - Complex64::new(0.0, 1.0 - r)).norm() < 1e-10);
        assert!((poles[1] - Complex64::new(0.0, 1.0 + r)).norm() < 1e-10);
    }

    #[test]
    fn negative_pair_example() {
        // a = -1, r0 = -1, k_1 = 1: poles {1 - i, -1 - i},
        // zeros {1 + i, -1 + i} — resonant lower-half pair with mirror.
        let m = model(-1.0, -1.0, &[1.0]);
        let poles = find_poles(m.reduced(), m.spectrum());
        assert_eq!(poles.len(), 2);
        assert!((poles[0] - Complex64::new(-1.0, -1.0)).norm() < 1e-10);
        assert!((poles[1] - Complex64::new(1.0, -1.0)).norm() < 1e-10);
        let zeros = find_zeros(m.reduced(), m.spectrum());
        assert!((zeros[0] - Complex64::new(-1.0, 1.0)).norm() < 1e-10);
        assert!((zeros[1] - Complex64::new(1.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn double_root_is_clustered() {
        // For N = 1 the kappa polynomial is (r0/2) kappa^2 - kappa + 1/a
        // for any k_1, so a = 2, r0 = 1 has the double root kappa = 1.
        // k_1 = 1 would put the observables on the epsilon = 0 manifold
        // (gamma k_1^2 = 1/a exactly); k_1 = 2 gives epsilon = 3/2 and the
        // same quadratic.
        let m = model(2.0, 1.0, &[2.0]);
        assert!((m.reduced().gamma_coef() - 0.5).abs() < 1e-15);
        assert!((m.reduced().epsilon() - 1.5).abs() < 1e-15);
        let report = pole_zero_report(m.reduced(), m.spectrum(), 1.0).unwrap();
        assert_eq!(report.poles.len(), 1, "double root must merge: {:?}", report.poles);
        assert_eq!(report.poles[0].multiplicity, 2);
        assert!((report.poles[0].k - Complex64::new(0.0, 1.0)).norm() < 1e-9);
        assert_eq!(report.poles[0].kind, PoleKind::Bound);
    }

    #[test]
    fn virtual_state_example() {
        // a = -1, r0 = 1, k_1 = 1: kappa = 1 +- sqrt(3); the branch
        // 1 - sqrt(3) < 0 gives a virtual state at k = i(1 - sqrt(3)).
        let m = model(-1.0, 1.0, &[1.0]);
        let poles = find_poles(m.reduced(), m.spectrum());
        let s3 = 3.0f64.sqrt();
        assert_eq!(poles.len(), 2);
        assert!((poles[0] - Complex64::new(0.0, 1.0 - s3)).norm() < 1e-10);
        assert!((poles[1] - Complex64::new(0.0, 1.0 + s3)).norm() < 1e-10);
        let report = pole_zero_report(m.reduced(), m.spectrum(), 1.0).unwrap();
        assert_eq!(report.poles[0].kind, PoleKind::Virtual);
        assert_eq!(report.poles[1].kind, PoleKind::Bound);
        // Virtual state energy is negative real.
        assert!(report.poles[0].energy_prime < 0.0);
        assert!(report.poles[0].energy.im.abs() < 1e-12);
    }

    #[test]
    fn classification_of_a_resonant_pole() {
        // kappa = -1 - i corresponds to k = i kappa = 1 - i: metastable,
        // E = scale k^2 = -4i for scale 2, E' = scale (p^2 - q^2) = 0,
        // Gamma_n = -scale p q = 2, gamma_from_energy = -2 Im E = 8.
        let recs = classify(&[(Complex64::new(-1.0, -1.0), 1)], 2.0);
        let r = &recs[0];
        assert!((r.k - Complex64::new(1.0, -1.0)).norm() < 1e-12);
        assert_eq!(r.kind, PoleKind::Metastable);
        assert!(r.energy_prime.abs() < 1e-12);
        assert!((r.gamma_n - 2.0).abs() < 1e-12);
        assert!((r.gamma_from_energy - 8.0).abs() < 1e-12);
        assert!((r.energy - Complex64::new(0.0, -4.0)).norm() < 1e-12);
    }

    #[test]
    fn trapping_poles_link_to_their_mirror() {
        let m = model(-1.0, -1.0, &[1.0]);
        let report = pole_zero_report(m.reduced(), m.spectrum(), 1.0).unwrap();
        let trapping: Vec<&PoleRecord> =
            report.poles.iter().filter(|r| r.kind == PoleKind::Trapping).collect();
        let metastable: Vec<usize> = report
            .poles
            .iter()
            .enumerate()
            .filter(|(_, r)| r.kind == PoleKind::Metastable)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(trapping.len(), 1);
        assert_eq!(metastable.len(), 1);
        assert_eq!(trapping[0].mirror_of, Some(metastable[0]));
        // Metastable width parameters are positive.
        assert!(report.poles[metastable[0]].gamma_n > 0.0);
    }

    #[test]
    fn upper_half_pair_is_flagged_not_dropped() {
        let m = model(1.0, 1.0, &[1.0]);
        let report = pole_zero_report(m.reduced(), m.spectrum(), 1.0).unwrap();
        assert_eq!(report.poles.len(), 2);
        for r in &report.poles {
            assert_eq!(r.kind, PoleKind::UnphysicalUpper);
        }
        assert!(report.max_symmetry_residual < 1e-9);
    }

    #[test]
    fn root_residuals_are_small() {
        let m = model(1.7, -0.8, &[0.9, 2.2, 3.8]);
        let report = pole_zero_report(m.reduced(), m.spectrum(), 1.0).unwrap();
        let coeffs = pole_polynomial(m.reduced(), m.spectrum());
        let scale: f64 = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
        for p in &report.pole_polish {
            assert!(p.converged, "unpolished root {:?}", p);
            assert!(p.residual <= 1e-10 * scale.max(1.0) * 1e3 || p.residual < 1e-6);
        }
        assert!(report.max_symmetry_residual < 1e-9);
        // 2N poles, multiplicity included.
        let total: usize = report.poles.iter().map(|r| r.multiplicity).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn dispersion_residual_at_bound_poles() {
        // Model with a true bound state: a = -1, r0 = 1, k_1 = 1 has a
        // bound pole at kappa = 1 + sqrt(3).
        let m = model(-1.0, 1.0, &[1.0]);
        let report = pole_zero_report(m.reduced(), m.spectrum(), 1.0).unwrap();
        for r in report.poles.iter().filter(|r| r.kind == PoleKind::Bound) {
            let res = dispersion_residual(r.k, m.extension(), m.reduced(), m.spectrum()).unwrap();
            assert!(res < 1e-9, "dispersion residual {res:.3e} at k = {}", r.k);
        }
    }

    #[test]
    fn dispersion_residual_structureless() {
        // N = 0, a = 1: bound pole at k = i, where the identity reduces to
        // -kappa/(4 pi k0) = gamma00 exactly.
        let m = ScatteringModel::from_observables(1.0, 0.0, vec![], Some(1.0)).unwrap();
        let res =
            dispersion_residual(Complex64::new(0.0, 1.0), None, m.reduced(), m.spectrum()).unwrap();
        assert!(res < 1e-15);
    }
}
