//! Real-coefficient polynomial utilities shared by the Taylor expansion and
//! the pole/zero finder: linear-factor expansion, companion-matrix root
//! seeds, Newton polishing, and cluster merging for (near-)multiple roots.
//!
//! Coefficient vectors are stored constant term first, so `coeffs[i]` is the
//! coefficient of `x^i`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

/// Newton refinement is stopped once the residual drops below this multiple
/// of the coefficient scale `max_i |c_i| |z|^i`; one f64 Horner pass cannot
/// reliably resolve values below roughly 1e-15 of that scale, so 1e-12
/// leaves three digits of slack.
pub const POLISH_RESIDUAL_TOL: f64 = 1e-12;

/// Maximum Newton steps per root before giving up and reporting the seed.
pub const POLISH_MAX_ITER: usize = 50;

/// Expand a product of linear factors `prod_i (c_i + b_i x)` into
/// coefficients. Accumulation is double-double, so the result is correctly
/// rounded for any sign pattern of the factors.
pub fn expand_linear_factors(factors: &[(f64, f64)]) -> Vec<f64> {
    use crate::dd::Dd;
    let mut acc: Vec<Dd> = vec![Dd::from_f64(1.0)];
    for &(c, b) in factors {
        let mut next = vec![Dd::ZERO; acc.len() + 1];
        for (j, &aj) in acc.iter().enumerate() {
            next[j] = next[j].add(aj.mul_f64(c));
            next[j + 1] = next[j + 1].add(aj.mul_f64(b));
        }
        acc = next;
    }
    acc.into_iter().map(|d| d.value()).collect()
}

/// Horner evaluation at a complex point.
pub fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut p = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        p = p * z + c;
    }
    p
}

/// Horner evaluation of the polynomial and its derivative.
pub fn eval_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Scale `sum_i |c_i| r^i` used to normalize residuals.
pub fn eval_magnitude(coeffs: &[f64], r: f64) -> f64 {
    let mut m = 0.0;
    for &c in coeffs.iter().rev() {
        m = m * r + c.abs();
    }
    m
}

/// Drop exactly-zero leading (highest-order) coefficients.
pub fn trim(coeffs: &[f64]) -> &[f64] {
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1] == 0.0 {
        n -= 1;
    }
    &coeffs[..n]
}

/// All complex roots as eigenvalues of the monic companion matrix. Returns
/// an empty list for constant (or identically zero) input. The roots come
/// back sorted by real part, then imaginary part.
pub fn companion_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let c = trim(coeffs);
    if c.len() <= 1 {
        return Vec::new();
    }
    let n = c.len() - 1;
    if n == 1 {
        return vec![Complex64::new(-c[0] / c[1], 0.0)];
    }
    let lead = c[n];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    let mut roots: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    sort_complex(&mut roots);
    roots
}

/// Outcome of Newton refinement of a single root seed. `converged` reports
/// whether the residual criterion was met; a failed polish still carries the
/// best iterate seen, it is never dropped.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PolishedRoot {
    pub root: Complex64,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Newton-polish a seed root. Keeps the iterate with the smallest residual
/// relative to the local coefficient scale, so a diverging step cannot make
/// the answer worse than the seed.
pub fn polish(coeffs: &[f64], seed: Complex64) -> PolishedRoot {
    let c = trim(coeffs);
    let residual_at = |z: Complex64| {
        let p = eval(c, z);
        (p.norm(), p.norm() / eval_magnitude(c, z.norm()).max(f64::MIN_POSITIVE))
    };

    let mut z = seed;
    let (_, mut best_rel) = residual_at(z);
    let mut best = z;
    let mut iterations = 0;

    for it in 0..POLISH_MAX_ITER {
        iterations = it;
        if best_rel <= POLISH_RESIDUAL_TOL {
            break;
        }
        let (p, dp) = eval_with_derivative(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        let (_, rel) = residual_at(z);
        if rel < best_rel {
            best_rel = rel;
            best = z;
        }
        if step.norm() <= f64::EPSILON * z.norm().max(1.0) {
            break;
        }
    }

    let (abs, rel) = residual_at(best);
    PolishedRoot { root: best, residual: abs, converged: rel <= POLISH_RESIDUAL_TOL, iterations }
}

/// Greedy cluster merge: roots closer than `tol` to a cluster mean are
/// absorbed into it. Returns (mean, multiplicity) pairs sorted by real part,
/// then imaginary part of the mean.
pub fn cluster(roots: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut sorted = roots.to_vec();
    sort_complex(&mut sorted);
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    'outer: for r in sorted {
        for (sum, count) in clusters.iter_mut() {
            let mean = *sum / *count as f64;
            if (r - mean).norm() < tol {
                *sum += r;
                *count += 1;
                continue 'outer;
            }
        }
        clusters.push((r, 1));
    }
    let mut out: Vec<(Complex64, usize)> =
        clusters.into_iter().map(|(s, c)| (s / c as f64, c)).collect();
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    out
}

/// Deterministic ordering used everywhere roots are reported.
pub fn sort_complex(zs: &mut [Complex64]) {
    zs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// For every element of `a`, the distance from its conjugate to the nearest
/// element of `b`. With `a == b` this measures closure of the set under
/// conjugation; with poles and zeros it measures the mirror relation
/// zeros = conj(poles).
pub fn conjugate_match_distances(a: &[Complex64], b: &[Complex64]) -> Vec<f64> {
    a.iter()
        .map(|&x| {
            b.iter().map(|&y| (x.conj() - y).norm()).fold(f64::INFINITY, f64::min)
        })
        .collect()
}
