//! Deterministic random-model factories shared by the integration suites.
//! Everything is seeded ChaCha8, so a failing case can be replayed exactly.

// Each suite links its own copy of this module and uses its own subset.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zrp_core::fitting::ScatteringModel;
use zrp_core::pontryagin::{BoundaryGamma, GOperatorRealization, MetricSignature};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Magnitude log-uniform over [lo, hi], random sign.
pub fn signed_log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let m = lo * (hi / lo).powf(r.random_range(0.0..=1.0));
    if r.random_bool(0.5) {
        m
    } else {
        -m
    }
}

/// n resonance wave numbers, uniform over [0.3, 10], sorted, resampled on
/// near-coincident pairs.
pub fn sample_ks(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let mut ks: Vec<f64> = (0..n).map(|_| r.random_range(0.3..=10.0)).collect();
        ks.sort_by(f64::total_cmp);
        if ks.windows(2).all(|w| w[1] - w[0] > 0.03) {
            return ks;
        }
    }
}

/// Cancellation ratio of the folded spectral sum
/// -sum_s P_s (1 + lambda_s^2)/(lambda_s - lambda) at the far end of the
/// sweep window: sum of term moduli over modulus of the sum. The residue
/// weights are stored in f64, so the dual-route identity for F is only
/// representable to about ratio * 1e-16; spectra beyond the sampler's cap
/// cannot meet a 1e-9 comparison no matter how the sum is accumulated.
fn route_amplification(m: &ScatteringModel) -> f64 {
    let ext = match m.extension() {
        Some(e) => e,
        None => return 1.0,
    };
    let k0 = m.spectrum().k0();
    // Slightly past the top of the k in (0, 10] evaluation window, off any
    // spectral point.
    let lambda = (10.37 / k0) * (10.37 / k0);
    let mut sum = 0.0;
    let mut mag = 0.0;
    for (ls, &ps) in m.spectrum().lambdas().into_iter().zip(ext.weights()) {
        let term = -ps * (1.0 + ls * ls) / (ls - lambda);
        sum += term;
        mag += term.abs();
    }
    mag / sum.abs().max(f64::MIN_POSITIVE)
}

/// Random coupled (or structureless, n = 0) model with moderate scales.
///
/// Three conditioning guards shape the acceptance region:
///  - epsilon = gamma prod k_s^2 - 1/a must not nearly cancel,
///  - 1/a must not be negligible against gamma prod k_s^2, and
///  - the route amplification of the fitted weights stays below 1e5.
/// Near the first two manifolds the observables <-> reduced maps lose
/// digits to subtraction and no finite-precision round trip can hold at
/// the 1e-13 level the suites demand; both cutoffs are at 1% in relative
/// size. The third keeps the dual-route comparison for F representable in
/// f64 at the 1e-9 level (see `route_amplification`). All three exclude
/// only thin slices of parameter space.
pub fn sample_model(r: &mut ChaCha8Rng, n: usize) -> ScatteringModel {
    loop {
        let a = signed_log_uniform(r, 0.1, 10.0);
        let k0 = r.random_range(0.5..=2.0);
        if n == 0 {
            return ScatteringModel::from_observables(a, 0.0, vec![], Some(k0))
                .expect("structureless models only reject a = 0");
        }
        let r0 = signed_log_uniform(r, 0.1, 10.0);
        let ks = sample_ks(r, n);
        // gamma prod_s k_s^2 collapses to r0 / (2 sum_s k_s^-2).
        let inv_sq: f64 = ks.iter().map(|k| 1.0 / (k * k)).sum();
        let gp = r0 / (2.0 * inv_sq);
        let inv_a = 1.0 / a;
        let eps = gp - inv_a;
        if eps.abs() < 1e-2 * gp.abs().max(inv_a.abs()) || inv_a.abs() < 1e-2 * gp.abs() {
            continue;
        }
        match ScatteringModel::from_observables(a, r0, ks, Some(k0)) {
            Ok(m) if route_amplification(&m) <= 1e5 => return m,
            _ => continue,
        }
    }
}

/// Random inner-operator realization: strictly increasing positive
/// eigenvalues, random +-1 metric, generating vector with components of
/// modulus in [0.3, 2] and random phase, scalar boundary parameter.
///
/// With `normalized` the generating vector is rescaled to [e, e] = +1
/// (resampling until the indefinite norm comes out positive), which the
/// boundary-form machinery requires.
pub fn sample_realization(r: &mut ChaCha8Rng, n: usize, normalized: bool) -> GOperatorRealization {
    loop {
        let mut eigenvalues = Vec::with_capacity(n);
        let mut next = r.random_range(0.2..=1.0);
        for _ in 0..n {
            eigenvalues.push(next);
            next += r.random_range(0.2..=2.0);
        }
        let metric =
            MetricSignature::new((0..n).map(|_| if r.random_bool(0.5) { 1 } else { -1 }).collect())
                .expect("signs are +-1 by construction");
        let mut e: Vec<Complex64> = (0..n)
            .map(|_| {
                let modulus = r.random_range(0.3..=2.0);
                let phase = r.random_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(modulus, phase)
            })
            .collect();
        let gamma = BoundaryGamma::Scalar(r.random_range(-2.0..=2.0));
        if normalized {
            let norm: f64 = (0..n).map(|s| metric.sign(s) * e[s].norm_sqr()).sum();
            if norm < 0.1 {
                continue;
            }
            let scale = 1.0 / norm.sqrt();
            for c in &mut e {
                *c *= scale;
            }
        }
        return GOperatorRealization::new(eigenvalues, metric, e, gamma)
            .expect("sampled realizations satisfy the constructor constraints");
    }
}

/// Spectral parameter off the real axis, |Im| in [0.4, 2.5].
pub fn sample_lambda(r: &mut ChaCha8Rng) -> Complex64 {
    let im = r.random_range(0.4..=2.5) * if r.random_bool(0.5) { 1.0 } else { -1.0 };
    Complex64::new(r.random_range(-3.0..=3.0), im)
}

/// One checklist line per criterion, then the assertion itself so cargo
/// reports the same verdict.
pub fn criterion(ok: bool, label: &str, detail: &str) {
    let tag = if ok { "[PASS]" } else { "[FAIL]" };
    println!("{tag} {label}: {detail}");
    assert!(ok, "{label}: {detail}");
}
