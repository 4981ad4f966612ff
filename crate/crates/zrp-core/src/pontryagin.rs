//! Indefinite-metric machinery for the inner operator: the metric dot
//! product, defect vectors of the restricted operator, the abstract boundary
//! form, the Q-function, and a Krein-type resolvent formula for the rank-one
//! boundary coupling.
//!
//! The inner operator B is diagonal in the canonical basis, the metric is a
//! diagonal sign matrix g, and all coupling runs through one generating
//! vector e, so every operation reduces to O(N) component arithmetic. This
//! module deliberately keeps the *matrix* form of each quantity; the closed
//! spectral shortcuts live in `model`, and the two routes cross-check each
//! other in the test suites.

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Matrix and closed routes of the boundary form must agree to this
/// absolute/relative hybrid tolerance: both are a handful of f64 operations,
/// so anything above a few ulp means inconsistent inputs.
pub const BOUNDARY_FORM_TOL: f64 = 1e-12;

/// How far [e, e] may sit from 1 before the boundary form refuses to apply
/// the normalized closed formula.
pub const E_NORM_TOL: f64 = 1e-10;

/// Diagonal metric with entries ±1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSignature {
    signs: Vec<i8>,
}

impl MetricSignature {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter {
                message: format!("metric signs must be +1 or -1, got {bad}"),
            });
        }
        Ok(MetricSignature { signs })
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Sign of the s-th diagonal entry as f64 (0-based index).
    pub fn sign(&self, s: usize) -> f64 {
        f64::from(self.signs[s])
    }
}

impl Serialize for MetricSignature {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.signs.len()))?;
        for s in &self.signs {
            seq.serialize_element(s)?;
        }
        seq.end()
    }
}

/// Boundary parameter of the coupled extension: a real scalar for the
/// rank-one case, or a Hermitian 2x2 block. The block variant is accepted at
/// construction but rejected by `krein_resolvent`, which only implements the
/// rank-one formula.
#[derive(Debug, Clone)]
pub enum BoundaryGamma {
    Scalar(f64),
    Hermitian2([[Complex64; 2]; 2]),
}

impl BoundaryGamma {
    /// Validated 2x2 Hermitian block.
    pub fn hermitian2(block: [[Complex64; 2]; 2]) -> Result<Self> {
        let hermitian = block[0][0].im == 0.0
            && block[1][1].im == 0.0
            && (block[0][1] - block[1][0].conj()).norm() == 0.0;
        if !hermitian {
            return Err(Error::InvalidParameter {
                message: "2x2 boundary block must be Hermitian".into(),
            });
        }
        Ok(BoundaryGamma::Hermitian2(block))
    }
}

/// Concrete inner realization: B = diag(lambda_1..lambda_N) with
/// 0 < lambda_1 < ... < lambda_N, diagonal metric g, generating vector e
/// with no vanishing component, and the boundary parameter Gamma.
#[derive(Debug, Clone)]
pub struct GOperatorRealization {
    eigenvalues: Vec<f64>,
    metric: MetricSignature,
    deficiency_vector: Vec<Complex64>,
    gamma: BoundaryGamma,
}

impl GOperatorRealization {
    pub fn new(
        eigenvalues: Vec<f64>,
        metric: MetricSignature,
        deficiency_vector: Vec<Complex64>,
        gamma: BoundaryGamma,
    ) -> Result<Self> {
        let n = eigenvalues.len();
        if metric.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: metric.len() });
        }
        if deficiency_vector.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: deficiency_vector.len() });
        }
        for (i, &l) in eigenvalues.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidParameter {
                    message: format!("inner eigenvalue lambda[{i}] = {l} must be positive and finite"),
                });
            }
            if i > 0 && !(l > eigenvalues[i - 1]) {
                return Err(Error::InvalidParameter {
                    message: format!("inner eigenvalues must be strictly increasing at index {i}"),
                });
            }
        }
        if let Some((i, _)) = deficiency_vector
            .iter()
            .enumerate()
            .find(|(_, c)| c.norm() == 0.0 || !c.is_finite())
        {
            return Err(Error::InvalidParameter {
                message: format!("generating vector component e[{i}] must be nonzero and finite"),
            });
        }
        Ok(GOperatorRealization { eigenvalues, metric, deficiency_vector, gamma })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn metric(&self) -> &MetricSignature {
        &self.metric
    }

    pub fn deficiency_vector(&self) -> &[Complex64] {
        &self.deficiency_vector
    }

    pub fn gamma(&self) -> &BoundaryGamma {
        &self.gamma
    }

    /// [e, e] — real because the metric is real diagonal.
    pub fn e_norm(&self) -> f64 {
        g_dot(&self.deficiency_vector, &self.deficiency_vector, &self.metric)
            .expect("dimensions checked at construction")
            .re
    }
}

/// Indefinite dot product [x, y] = sum_s g_ss conj(x_s) y_s, anti-linear in
/// the first argument.
pub fn g_dot(x: &[Complex64], y: &[Complex64], metric: &MetricSignature) -> Result<Complex64> {
    if x.len() != metric.len() {
        return Err(Error::DimensionMismatch { expected: metric.len(), got: x.len() });
    }
    if y.len() != metric.len() {
        return Err(Error::DimensionMismatch { expected: metric.len(), got: y.len() });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..metric.len() {
        acc += metric.sign(s) * x[s].conj() * y[s];
    }
    Ok(acc)
}

/// Defect vectors of the restriction of B and the Cayley image of the
/// generating vector:
///
///   w_plus  = B (B - i)^-1 e        (component lambda_s/(lambda_s - i) e_s)
///   w_minus = -(B - i)^-1 e         (component -e_s/(lambda_s - i))
///   e_prime = (B + i)(B - i)^-1 e   (component (lambda_s + i)/(lambda_s - i) e_s)
#[derive(Debug, Clone)]
pub struct DefectBasis {
    pub w_plus: Vec<Complex64>,
    pub w_minus: Vec<Complex64>,
    pub e_prime: Vec<Complex64>,
}

pub fn defect_basis(realization: &GOperatorRealization) -> DefectBasis {
    let i = Complex64::new(0.0, 1.0);
    let mut w_plus = Vec::with_capacity(realization.dim());
    let mut w_minus = Vec::with_capacity(realization.dim());
    let mut e_prime = Vec::with_capacity(realization.dim());
    for (&l, &e) in realization.eigenvalues.iter().zip(&realization.deficiency_vector) {
        let den = Complex64::new(l, 0.0) - i;
        w_plus.push(l * e / den);
        w_minus.push(-e / den);
        e_prime.push((Complex64::new(l, 0.0) + i) * e / den);
    }
    DefectBasis { w_plus, w_minus, e_prime }
}

/// Coordinates of a vector in the defect plane span{w_plus, w_minus}.
#[derive(Debug, Clone, Copy)]
pub struct SymplecticCoordinates {
    pub xi_plus: Complex64,
    pub xi_minus: Complex64,
}

/// Closed form of the boundary form in defect-plane coordinates for a
/// normalized generating vector ([e, e] = 1):
///
///   K(x, y) = conj(xi_plus^x) xi_minus^y - conj(xi_minus^x) xi_plus^y.
///
/// The conjugation pattern follows the anti-linear-first convention of
/// `g_dot`; swapping the arguments flips K to -conj(K).
pub fn boundary_form_closed(x: SymplecticCoordinates, y: SymplecticCoordinates) -> Complex64 {
    x.xi_plus.conj() * y.xi_minus - x.xi_minus.conj() * y.xi_plus
}

/// Abstract boundary form K(x, y) = [Adj x, y] - [x, Adj y] where the
/// adjoint of the restricted operator acts on the defect plane by
/// w_plus -> w_minus, w_minus -> -w_plus.
///
/// Computed through the vectors and the metric, then verified against the
/// closed coordinate form; a disagreement beyond `BOUNDARY_FORM_TOL` (scaled)
/// reports inconsistent inputs. Requires [e, e] = 1 within `E_NORM_TOL`.
pub fn boundary_form(
    x: SymplecticCoordinates,
    y: SymplecticCoordinates,
    basis: &DefectBasis,
    realization: &GOperatorRealization,
) -> Result<Complex64> {
    let e_norm = realization.e_norm();
    if (e_norm - 1.0).abs() > E_NORM_TOL {
        return Err(Error::NotNormalized { e_norm });
    }

    let n = realization.dim();
    if basis.w_plus.len() != n || basis.w_minus.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: basis.w_plus.len() });
    }

    let combine = |c: SymplecticCoordinates| -> (Vec<Complex64>, Vec<Complex64>) {
        let mut vec = Vec::with_capacity(n);
        let mut adj = Vec::with_capacity(n);
        for s in 0..n {
            vec.push(c.xi_plus * basis.w_plus[s] + c.xi_minus * basis.w_minus[s]);
            // Adjoint action: w_plus picks up w_minus, w_minus picks up -w_plus.
            adj.push(c.xi_plus * basis.w_minus[s] - c.xi_minus * basis.w_plus[s]);
        }
        (vec, adj)
    };

    let (xv, x_adj) = combine(x);
    let (yv, y_adj) = combine(y);
    let k = g_dot(&x_adj, &yv, &realization.metric)? - g_dot(&xv, &y_adj, &realization.metric)?;

    let closed = boundary_form_closed(x, y);
    let scale = k.norm().max(1.0);
    let residual = (k - closed).norm() / scale;
    if residual > BOUNDARY_FORM_TOL {
        return Err(Error::DualRouteMismatch { context: "boundary_form", residual });
    }
    Ok(k)
}

/// Q-function of the realization,
/// Q(lambda) = [e, (I + lambda B)(B - lambda)^-1 e],
/// evaluated by applying the diagonal resolvent to e and closing with g_dot.
pub fn q_matrix(lambda: Complex64, realization: &GOperatorRealization) -> Result<Complex64> {
    let mut v = Vec::with_capacity(realization.dim());
    for (&l, &e) in realization.eigenvalues.iter().zip(&realization.deficiency_vector) {
        let den = Complex64::new(l, 0.0) - lambda;
        if den.norm() == 0.0 {
            return Err(Error::SpectralSingularity { lambda });
        }
        v.push((Complex64::new(1.0, 0.0) + lambda * l) / den * e);
    }
    g_dot(&realization.deficiency_vector, &v, &realization.metric)
}

/// Resolvent of the Gamma-coupled rank-one extension applied to f:
///
///   R(lambda) f = (B - lambda)^-1 f
///     + [e, (B - i)(B - lambda)^-1 f] / ([e,e] Gamma - Q(lambda))
///       * (B + i)(B - lambda)^-1 e.
///
/// Fails on the inner spectrum (`SpectralSingularity`), at eigenvalues of
/// the coupled extension where the denominator vanishes exactly
/// (`ExtensionSingularity`), and for block boundary parameters
/// (`HigherRankGamma`). Near-singular points return large finite values; the
/// divergence is the physics, not an error.
pub fn krein_resolvent(
    lambda: Complex64,
    f: &[Complex64],
    realization: &GOperatorRealization,
) -> Result<Vec<Complex64>> {
    let gamma = match realization.gamma {
        BoundaryGamma::Scalar(g) => g,
        BoundaryGamma::Hermitian2(_) => return Err(Error::HigherRankGamma),
    };
    let n = realization.dim();
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.len() });
    }

    let i = Complex64::new(0.0, 1.0);
    let q = q_matrix(lambda, realization)?;
    let denom = realization.e_norm() * gamma - q;
    if denom.norm() == 0.0 {
        return Err(Error::ExtensionSingularity { lambda });
    }

    // (B - lambda)^-1 f, and (B - i)(B - lambda)^-1 f for the functional.
    let mut r0f = Vec::with_capacity(n);
    let mut bmi_r0f = Vec::with_capacity(n);
    for (&l, &fs) in realization.eigenvalues.iter().zip(f) {
        let den = Complex64::new(l, 0.0) - lambda;
        let r = fs / den;
        r0f.push(r);
        bmi_r0f.push((Complex64::new(l, 0.0) - i) * r);
    }
    let phi = g_dot(&realization.deficiency_vector, &bmi_r0f, &realization.metric)?;
    let coef = phi / denom;

    let out = realization
        .eigenvalues
        .iter()
        .zip(&realization.deficiency_vector)
        .zip(&r0f)
        .map(|((&l, &e), &r)| {
            let v = (Complex64::new(l, 0.0) + i) * e / (Complex64::new(l, 0.0) - lambda);
            r + coef * v
        })
        .collect();
    Ok(out)
}
