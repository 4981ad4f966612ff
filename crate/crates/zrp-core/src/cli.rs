//! Config parsing, report construction and text rendering for the `zrp`
//! binary. Everything here is plain string-in/string-out so the whole
//! command surface is testable without spawning a process.
//!
//! Exit-code contract: 0 success, 1 config/usage, 2 model/math domain
//! error, 3 validation failure.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitting::ScatteringModel;
use crate::pontryagin::{krein_resolvent, BoundaryGamma, GOperatorRealization};
use crate::scattering::{self, ScatteringPoint};
use crate::spectral::{pole_zero_report, PoleZeroReport};
use crate::{baselines, model, Error};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Model(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(CliError::Config(format!("unknown output format '{other}' (json|csv)"))),
        }
    }
}

/// Model description as read from the config file. `mode` selects which
/// parameter pair is given: "observables" takes (a, r0), "reduced" takes
/// (a0, alpha); the fields of the other mode must be absent. `spectrum_k`
/// lists the resonance wave numbers (possibly empty), `k0` and
/// `energy_scale` are optional and can also be supplied as command-line
/// overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub spectrum_k: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_scale: Option<f64>,
}

impl ModelConfig {
    /// Check mode/field consistency; unknown keys are already rejected by
    /// the deserializer.
    pub fn validate(&self) -> Result<(), CliError> {
        let require = |name: &str, present: bool| {
            if present {
                Ok(())
            } else {
                Err(CliError::Config(format!("mode '{}' requires field '{name}'", self.mode)))
            }
        };
        let forbid = |name: &str, absent: bool| {
            if absent {
                Ok(())
            } else {
                Err(CliError::Config(format!("field '{name}' is not allowed in mode '{}'", self.mode)))
            }
        };
        match self.mode.as_str() {
            "observables" => {
                require("a", self.a.is_some())?;
                require("r0", self.r0.is_some())?;
                forbid("a0", self.a0.is_none())?;
                forbid("alpha", self.alpha.is_none())?;
            }
            "reduced" => {
                require("a0", self.a0.is_some())?;
                require("alpha", self.alpha.is_some())?;
                forbid("a", self.a.is_none())?;
                forbid("r0", self.r0.is_none())?;
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown mode '{other}' (observables|reduced)"
                )));
            }
        }
        Ok(())
    }

    /// Fold command-line overrides into the config.
    pub fn apply_overrides(&mut self, k0: Option<f64>, energy_scale: Option<f64>) {
        if k0.is_some() {
            self.k0 = k0;
        }
        if energy_scale.is_some() {
            self.energy_scale = energy_scale;
        }
    }

    pub fn build_model(&self) -> Result<ScatteringModel, CliError> {
        self.validate()?;
        let ks = self.spectrum_k.clone();
        let m = match self.mode.as_str() {
            "observables" => {
                ScatteringModel::from_observables(self.a.unwrap(), self.r0.unwrap(), ks, self.k0)?
            }
            _ => ScatteringModel::from_reduced(self.a0.unwrap(), self.alpha.unwrap(), ks, self.k0)?,
        };
        Ok(m)
    }
}

pub fn parse_config(text: &str) -> Result<ModelConfig, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

/// Uniform wave-number grid for sweeps and validation scans.
#[derive(Debug, Clone, Copy)]
pub struct SweepGrid {
    kmin: f64,
    kmax: f64,
    num: usize,
}

impl SweepGrid {
    pub fn new(kmin: f64, kmax: f64, num: usize) -> Result<Self, CliError> {
        if !(kmin.is_finite() && kmin >= 0.0) {
            return Err(CliError::Config(format!("kmin = {kmin} must be finite and >= 0")));
        }
        if !(kmax.is_finite() && kmax >= kmin) {
            return Err(CliError::Config(format!("kmax = {kmax} must be finite and >= kmin = {kmin}")));
        }
        if num == 0 {
            return Err(CliError::Config("num must be at least 1".into()));
        }
        if num > 1 && kmax == kmin {
            return Err(CliError::Config(format!("num = {num} points need kmax > kmin")));
        }
        Ok(SweepGrid { kmin, kmax, num })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.num == 1 {
            return vec![self.kmin];
        }
        (0..self.num)
            .map(|i| self.kmin + (self.kmax - self.kmin) * i as f64 / (self.num - 1) as f64)
            .collect()
    }
}

/// Evaluate the model over the grid (in parallel) and unwrap the phase
/// sequence so delta is continuous through resonances.
pub fn sweep_points(model: &ScatteringModel, grid: &SweepGrid) -> Result<Vec<ScatteringPoint>, CliError> {
    let points: Result<Vec<ScatteringPoint>, Error> =
        grid.values().par_iter().map(|&k| model.evaluate(k)).collect();
    let points = points?;
    let mut deltas: Vec<f64> = points.iter().map(|p| p.delta()).collect();
    scattering::unwrap_phases(&mut deltas);
    Ok(points.into_iter().zip(deltas).map(|(p, d)| p.with_delta(d)).collect())
}

/// CSV rendering of a sweep; column order is part of the output contract
/// and every value is printed with 17 significant digits.
pub fn sweep_csv(points: &[ScatteringPoint]) -> String {
    use std::fmt::Write;
    let mut out = String::from("k,F,delta,Re_S,Im_S,sigma\n");
    for p in points {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.k(),
            p.k_cot_delta(),
            p.delta(),
            p.s_matrix().re,
            p.s_matrix().im,
            p.sigma()
        )
        .expect("writing to a String cannot fail");
    }
    out
}

#[derive(Debug, Serialize)]
struct SweepOutput<'a> {
    points: &'a [ScatteringPoint],
}

#[derive(Debug, Serialize)]
struct FitReport<'a> {
    observables: &'a crate::fitting::PhysicalObservables,
    reduced: &'a crate::model::ReducedParameters,
    extension: Option<&'a crate::model::ExtensionParameters>,
    /// Config that reproduces this model exactly when fed back through
    /// `zrp fit --config -`.
    refit_config: ModelConfig,
}

fn refit_config(model: &ScatteringModel, energy_scale: Option<f64>) -> ModelConfig {
    ModelConfig {
        mode: "reduced".into(),
        a: None,
        r0: None,
        a0: Some(model.reduced().a0()),
        alpha: Some(model.reduced().alpha()),
        spectrum_k: model.spectrum().ks().to_vec(),
        k0: Some(model.spectrum().k0()),
        energy_scale,
    }
}

fn render_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn reject_csv(format: OutputFormat, command: &str) -> Result<(), CliError> {
    if format == OutputFormat::Csv {
        return Err(CliError::Config(format!(
            "csv output is not defined for '{command}' (use json)"
        )));
    }
    Ok(())
}

/// `zrp fit`: resolve all three parameter pictures and report them.
pub fn cmd_fit(config: &ModelConfig, format: OutputFormat) -> Result<String, CliError> {
    reject_csv(format, "fit")?;
    let model = config.build_model()?;
    let report = FitReport {
        observables: model.observables(),
        reduced: model.reduced(),
        extension: model.extension(),
        refit_config: refit_config(&model, config.energy_scale),
    };
    render_json(&report)
}

/// `zrp sweep`: scattering data over a k grid.
pub fn cmd_sweep(
    config: &ModelConfig,
    grid: &SweepGrid,
    format: OutputFormat,
) -> Result<String, CliError> {
    let model = config.build_model()?;
    let points = sweep_points(&model, grid)?;
    match format {
        OutputFormat::Csv => Ok(sweep_csv(&points)),
        OutputFormat::Json => render_json(&SweepOutput { points: &points }),
    }
}

#[derive(Debug, Serialize)]
struct PolesOutput<'a> {
    energy_scale: f64,
    #[serde(flatten)]
    report: &'a PoleZeroReport,
}

/// `zrp poles`: resolvent poles/zeros with classification.
pub fn cmd_poles(config: &ModelConfig, format: OutputFormat) -> Result<String, CliError> {
    reject_csv(format, "poles")?;
    let model = config.build_model()?;
    let energy_scale = config.energy_scale.unwrap_or(1.0);
    let report = pole_zero_report(model.reduced(), model.spectrum(), energy_scale)?;
    render_json(&PolesOutput { energy_scale, report: &report })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl ValidationCheck {
    fn skipped(name: &'static str, detail: impl Into<String>) -> Self {
        ValidationCheck {
            name,
            status: CheckStatus::Skipped,
            max_residual: None,
            tolerance: None,
            detail: detail.into(),
        }
    }

    fn from_residual(name: &'static str, residual: f64, tolerance: f64, detail: String) -> Self {
        let status = if residual <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        ValidationCheck { name, status, max_residual: Some(residual), tolerance: Some(tolerance), detail }
    }

    fn error(name: &'static str, err: impl std::fmt::Display) -> Self {
        ValidationCheck {
            name,
            status: CheckStatus::Fail,
            max_residual: None,
            tolerance: None,
            detail: format!("check aborted: {err}"),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
    pub passed: bool,
}

/// Grid points sitting (essentially) on a resonance wave number are
/// excluded from the checks that evaluate the fraction form, which has a
/// removable structure there but an actual Q-pole at the exact point.
fn near_resonance(spectrum: &model::InnerSpectrum, k: f64) -> bool {
    spectrum.ks().iter().any(|&ks| (k - ks).abs() <= 1e-9 * ks.max(1.0))
}

fn check_analyticity(model: &ScatteringModel, grid: &SweepGrid) -> ValidationCheck {
    const NAME: &str = "analyticity";
    const TOL: f64 = 1e-9;
    let Some(ext) = model.extension() else {
        return ValidationCheck::skipped(NAME, "no inner extension: single evaluation route for F");
    };
    let mut worst = 0.0f64;
    let mut worst_k = 0.0f64;
    for k in grid.values() {
        if near_resonance(model.spectrum(), k) {
            continue;
        }
        let kk = Complex64::new(k, 0.0);
        let fp = model::f_polynomial(kk, model.reduced(), model.spectrum());
        let ff = match model::f_fraction(kk, ext, model.spectrum()) {
            Ok(v) => v,
            Err(e) => return ValidationCheck::error(NAME, e),
        };
        let r = (fp - ff).norm() / fp.norm().max(1.0);
        if r > worst {
            worst = r;
            worst_k = k;
        }
    }
    ValidationCheck::from_residual(
        NAME,
        worst,
        TOL,
        format!("polynomial vs fraction form of F; worst point k = {worst_k}"),
    )
}

fn check_unitarity(model: &ScatteringModel, grid: &SweepGrid) -> ValidationCheck {
    const NAME: &str = "unitarity";
    const TOL: f64 = 1e-10;
    let mut worst = 0.0f64;
    let mut worst_k = 0.0f64;
    for k in grid.values() {
        let p = match model.evaluate(k) {
            Ok(v) => v,
            Err(e) => return ValidationCheck::error(NAME, e),
        };
        let r_s = (p.s_matrix().norm() - 1.0).abs();
        let f = p.amplitude();
        let optical = (f.im - k * f.norm_sqr()).abs() / (k * f.norm_sqr()).max(1e-12);
        let r = r_s.max(optical);
        if r > worst {
            worst = r;
            worst_k = k;
        }
    }
    ValidationCheck::from_residual(
        NAME,
        worst,
        TOL,
        format!("|S| = 1 and the optical theorem; worst point k = {worst_k}"),
    )
}

fn check_pole_zero_conjugation(model: &ScatteringModel) -> ValidationCheck {
    const NAME: &str = "pole_zero_conjugation";
    let report = match pole_zero_report(model.reduced(), model.spectrum(), 1.0) {
        Ok(r) => r,
        Err(e) => return ValidationCheck::error(NAME, e),
    };
    let scale = report.poles.iter().map(|r| r.k.norm()).fold(1.0f64, f64::max);
    let tol = 1e-8 * scale;
    ValidationCheck::from_residual(
        NAME,
        report.max_symmetry_residual,
        tol,
        format!("zeros = conj(poles) over {} pole(s)", report.poles.len()),
    )
}

fn check_boundary_identity(model: &ScatteringModel, grid: &SweepGrid) -> ValidationCheck {
    const NAME: &str = "boundary_identity";
    const TOL: f64 = 1e-10;
    let mut worst = 0.0f64;
    let mut worst_k = 0.0f64;
    for k in grid.values() {
        if near_resonance(model.spectrum(), k) {
            continue;
        }
        let res = match scattering::boundary_identity_residual(
            k,
            model.extension(),
            model.reduced(),
            model.spectrum(),
        ) {
            Ok(v) => v,
            Err(e) => return ValidationCheck::error(NAME, e),
        };
        let scale = (model::f_polynomial(Complex64::new(k, 0.0), model.reduced(), model.spectrum())
            .norm()
            / model.spectrum().k0())
        .max(1e-12);
        let r = res / scale;
        if r > worst {
            worst = r;
            worst_k = k;
        }
    }
    let route = if model.extension().is_some() { "coupled" } else { "structureless" };
    ValidationCheck::from_residual(
        NAME,
        worst,
        TOL,
        format!("4 pi / T + i sqrt(lambda) = F/k0 ({route} route); worst point k = {worst_k}"),
    )
}

fn check_laurent_cancellation(model: &ScatteringModel) -> ValidationCheck {
    const NAME: &str = "laurent_cancellation";
    const TOL: f64 = 1e-10;
    let Some(ext) = model.extension() else {
        return ValidationCheck::skipped(NAME, "no inner extension: no weight family to check");
    };
    match model::laurent_residual(model.spectrum(), ext.weights(), ext.lambda_big(), ext.gamma11()) {
        Ok(res) => ValidationCheck::from_residual(
            NAME,
            res,
            TOL,
            "weight moments against Lambda and gamma11".into(),
        ),
        Err(e) => ValidationCheck::error(NAME, e),
    }
}

fn check_krein_resolvent(model: &ScatteringModel) -> ValidationCheck {
    const NAME: &str = "krein_resolvent_identity";
    const TOL: f64 = 1e-10;
    let Some(ext) = model.extension() else {
        return ValidationCheck::skipped(NAME, "no inner extension: no coupled resolvent to check");
    };
    let e: Vec<Complex64> =
        ext.e_abs2().iter().map(|&p| Complex64::new(p.sqrt(), 0.0)).collect();
    let realization = match GOperatorRealization::new(
        model.spectrum().lambdas(),
        ext.metric().clone(),
        e.clone(),
        BoundaryGamma::Scalar(ext.gamma11()),
    ) {
        Ok(r) => r,
        Err(err) => return ValidationCheck::error(NAME, err),
    };
    let lambda = Complex64::new(0.37, 0.81);
    // Candidate second points, tried in order in case one of them hits an
    // eigenvalue of the coupled extension exactly.
    let mu_candidates = [
        Complex64::new(-1.21, -0.43),
        Complex64::new(2.05, 1.3),
        Complex64::new(-0.6, 2.2),
    ];
    for &mu in &mu_candidates {
        let rl = match krein_resolvent(lambda, &e, &realization) {
            Ok(v) => v,
            Err(err) => return ValidationCheck::error(NAME, err),
        };
        let rm = match krein_resolvent(mu, &e, &realization) {
            Ok(v) => v,
            Err(Error::ExtensionSingularity { .. }) => continue,
            Err(err) => return ValidationCheck::error(NAME, err),
        };
        let rlm = match krein_resolvent(lambda, &rm, &realization) {
            Ok(v) => v,
            Err(Error::ExtensionSingularity { .. }) => continue,
            Err(err) => return ValidationCheck::error(NAME, err),
        };
        let scale = rl
            .iter()
            .chain(&rm)
            .map(|c| c.norm())
            .fold(1.0f64, f64::max);
        let mut worst = 0.0f64;
        for s in 0..rl.len() {
            let lhs = rl[s] - rm[s];
            let rhs = (lambda - mu) * rlm[s];
            worst = worst.max((lhs - rhs).norm() / scale);
        }
        return ValidationCheck::from_residual(
            NAME,
            worst,
            TOL,
            format!("R(lambda) - R(mu) = (lambda - mu) R(lambda) R(mu) at lambda = {lambda}, mu = {mu}"),
        );
    }
    ValidationCheck::error(NAME, "all probe points mu hit extension singularities")
}

/// Run the full consistency battery on a model. `grid` defaults to 201
/// points on [0, 2 max k_s + 3].
pub fn validate_report(model: &ScatteringModel, grid: Option<SweepGrid>) -> ValidationReport {
    let grid = grid.unwrap_or_else(|| {
        let kmax = model.spectrum().ks().iter().copied().fold(0.0f64, f64::max) * 2.0 + 3.0;
        SweepGrid::new(0.0, kmax, 201).expect("default grid parameters are valid")
    });
    let checks = vec![
        check_analyticity(model, &grid),
        check_unitarity(model, &grid),
        check_pole_zero_conjugation(model),
        check_boundary_identity(model, &grid),
        check_laurent_cancellation(model),
        check_krein_resolvent(model),
    ];
    let passed = checks.iter().all(|c| c.status != CheckStatus::Fail);
    ValidationReport { checks, passed }
}

/// Rendered validation output plus the pass/fail verdict the binary turns
/// into its exit code.
pub struct ValidateOutcome {
    pub rendered: String,
    pub passed: bool,
}

/// `zrp validate`.
pub fn cmd_validate(
    config: &ModelConfig,
    grid: Option<SweepGrid>,
    format: OutputFormat,
) -> Result<ValidateOutcome, CliError> {
    reject_csv(format, "validate")?;
    let model = config.build_model()?;
    let report = validate_report(&model, grid);
    Ok(ValidateOutcome { rendered: render_json(&report)?, passed: report.passed })
}

/// Log-spaced squeezing grid `MIN:MAX:NUM` for the delta-shell baseline.
#[derive(Debug, Clone, Copy)]
pub struct EpsGrid {
    pub min: f64,
    pub max: f64,
    pub num: usize,
}

impl Default for EpsGrid {
    fn default() -> Self {
        // Dense enough that the last decade resolves the tangent
        // oscillation of the attractive branch; see `DeltaSweep::converged`.
        EpsGrid { min: 1e-6, max: 1e-1, num: 10001 }
    }
}

impl std::str::FromStr for EpsGrid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!("eps grid '{s}' must have the form MIN:MAX:NUM")));
        }
        let min: f64 = parts[0]
            .parse()
            .map_err(|_| CliError::Config(format!("bad eps grid minimum '{}'", parts[0])))?;
        let max: f64 = parts[1]
            .parse()
            .map_err(|_| CliError::Config(format!("bad eps grid maximum '{}'", parts[1])))?;
        let num: usize = parts[2]
            .parse()
            .map_err(|_| CliError::Config(format!("bad eps grid count '{}'", parts[2])))?;
        Ok(EpsGrid { min, max, num })
    }
}

#[derive(Debug, Serialize)]
struct WignerPoint {
    k: f64,
    sigma: f64,
}

/// `zrp baseline wigner`: structureless cross section over a k grid.
pub fn cmd_baseline_wigner(a: f64, grid: &SweepGrid, format: OutputFormat) -> Result<String, CliError> {
    let points: Result<Vec<WignerPoint>, Error> = grid
        .values()
        .iter()
        .map(|&k| baselines::wigner_sigma(a, k).map(|sigma| WignerPoint { k, sigma }))
        .collect();
    let points = points?;
    match format {
        OutputFormat::Json => render_json(&SweepLike { points: &points }),
        OutputFormat::Csv => {
            use std::fmt::Write;
            let mut out = String::from("k,sigma\n");
            for p in &points {
                writeln!(out, "{:.16e},{:.16e}", p.k, p.sigma).expect("writing to a String cannot fail");
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Serialize)]
struct SweepLike<'a, T: Serialize> {
    points: &'a [T],
}

#[derive(Debug, Serialize)]
struct DeltaOutput<'a> {
    attractive: bool,
    skipped: usize,
    converged: bool,
    last_decade_spread: f64,
    last_decade_mean: f64,
    points: &'a [baselines::DeltaSweepPoint],
}

/// `zrp baseline --delta`: delta-shell squeezing sequence. The branch flag
/// must match the sign of a (attractive means a < 0).
pub fn cmd_baseline_delta(
    a: f64,
    r0: f64,
    attractive: bool,
    eps: &EpsGrid,
    format: OutputFormat,
) -> Result<String, CliError> {
    let sweep = baselines::delta_sweep(a, r0, attractive, eps.min, eps.max, eps.num)?;
    match format {
        OutputFormat::Json => render_json(&DeltaOutput {
            attractive,
            skipped: sweep.skipped,
            converged: sweep.converged,
            last_decade_spread: sweep.last_decade_spread,
            last_decade_mean: sweep.last_decade_mean,
            points: &sweep.points,
        }),
        OutputFormat::Csv => {
            use std::fmt::Write;
            let mut out = String::from("eps,x,sigma,ratio\n");
            for p in &sweep.points {
                writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", p.eps, p.x, p.sigma, p.ratio)
                    .expect("writing to a String cannot fail");
            }
            Ok(out)
        }
    }
}
