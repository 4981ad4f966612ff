//! Python bindings: one `Model` class wrapping the full fit, plus the
//! baseline curves as free functions. Complex values cross the boundary as
//! Python complex numbers; structured results come back as plain dicts so
//! the Python side needs no wrapper types.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use zrp_core::cli::{validate_report, CheckStatus, SweepGrid};
use zrp_core::spectral::{pole_zero_report, PoleKind};
use zrp_core::{baselines, ScatteringModel, ScatteringPoint};

fn model_err(e: zrp_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cli_err(e: zrp_core::cli::CliError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn kind_name(kind: PoleKind) -> &'static str {
    match kind {
        PoleKind::Bound => "bound",
        PoleKind::Virtual => "virtual",
        PoleKind::Metastable => "metastable",
        PoleKind::Trapping => "trapping",
        PoleKind::UnphysicalUpper => "unphysical_upper",
    }
}

fn point_dict<'py>(py: Python<'py>, p: &ScatteringPoint) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("k", p.k())?;
    d.set_item("F", p.k_cot_delta())?;
    d.set_item("delta", p.delta())?;
    d.set_item("S", p.s_matrix())?;
    d.set_item("f", p.amplitude())?;
    d.set_item("sigma", p.sigma())?;
    Ok(d)
}

/// One fitted scattering model.
#[pyclass]
struct Model {
    inner: ScatteringModel,
}

#[pymethods]
impl Model {
    /// Build from observables (a, r0) and resonance wave numbers.
    #[staticmethod]
    #[pyo3(signature = (a, r0, spectrum_k, k0=None))]
    fn from_observables(a: f64, r0: f64, spectrum_k: Vec<f64>, k0: Option<f64>) -> PyResult<Self> {
        Ok(Model { inner: ScatteringModel::from_observables(a, r0, spectrum_k, k0).map_err(model_err)? })
    }

    /// Build from reduced parameters (a0, alpha).
    #[staticmethod]
    #[pyo3(signature = (a0, alpha, spectrum_k, k0=None))]
    fn from_reduced(a0: f64, alpha: f64, spectrum_k: Vec<f64>, k0: Option<f64>) -> PyResult<Self> {
        Ok(Model { inner: ScatteringModel::from_reduced(a0, alpha, spectrum_k, k0).map_err(model_err)? })
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.observables().a()
    }

    #[getter]
    fn r0(&self) -> f64 {
        self.inner.observables().r0()
    }

    #[getter]
    fn a0(&self) -> f64 {
        self.inner.reduced().a0()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.reduced().alpha()
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.reduced().epsilon()
    }

    #[getter]
    fn gamma_coef(&self) -> f64 {
        self.inner.reduced().gamma_coef()
    }

    #[getter]
    fn k0(&self) -> f64 {
        self.inner.spectrum().k0()
    }

    #[getter]
    fn spectrum_k(&self) -> Vec<f64> {
        self.inner.spectrum().ks().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// Extension parameters as a dict, or None for a structureless model.
    fn extension<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyDict>>> {
        let Some(ext) = self.inner.extension() else { return Ok(None) };
        let d = PyDict::new(py);
        d.set_item("Lambda", ext.lambda_big())?;
        d.set_item("P", ext.weights().to_vec())?;
        d.set_item("g", ext.metric().signs().to_vec())?;
        d.set_item("e_abs2", ext.e_abs2().to_vec())?;
        d.set_item("gamma00", ext.gamma00())?;
        d.set_item("gamma01_abs2", ext.gamma01_abs2())?;
        d.set_item("gamma11", ext.gamma11())?;
        d.set_item("e_norm", ext.e_norm())?;
        Ok(Some(d))
    }

    /// Scattering data at one wave number.
    fn evaluate<'py>(&self, py: Python<'py>, k: f64) -> PyResult<Bound<'py, PyDict>> {
        point_dict(py, &self.inner.evaluate(k).map_err(model_err)?)
    }

    /// Scattering data over a uniform grid, with the phase unwrapped.
    fn sweep<'py>(
        &self,
        py: Python<'py>,
        kmin: f64,
        kmax: f64,
        num: usize,
    ) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let grid = SweepGrid::new(kmin, kmax, num).map_err(cli_err)?;
        let points = zrp_core::cli::sweep_points(&self.inner, &grid).map_err(cli_err)?;
        points.iter().map(|p| point_dict(py, p)).collect()
    }

    /// Classified S-matrix poles.
    #[pyo3(signature = (energy_scale=1.0))]
    fn poles<'py>(&self, py: Python<'py>, energy_scale: f64) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let report = pole_zero_report(self.inner.reduced(), self.inner.spectrum(), energy_scale)
            .map_err(model_err)?;
        report
            .poles
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("k", r.k)?;
                d.set_item("kind", kind_name(r.kind))?;
                d.set_item("E", r.energy)?;
                d.set_item("E_prime", r.energy_prime)?;
                d.set_item("Gamma_n", r.gamma_n)?;
                d.set_item("gamma_from_energy", r.gamma_from_energy)?;
                d.set_item("multiplicity", r.multiplicity)?;
                d.set_item("mirror_of", r.mirror_of)?;
                Ok(d)
            })
            .collect()
    }

    /// S-matrix zeros (multiplicity expanded).
    fn zeros(&self) -> PyResult<Vec<Complex64>> {
        Ok(zrp_core::spectral::find_zeros(self.inner.reduced(), self.inner.spectrum()))
    }

    /// Run the consistency battery; returns {check name: status string}.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let report = validate_report(&self.inner, None);
        let d = PyDict::new(py);
        for c in &report.checks {
            let status = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "fail",
                CheckStatus::Skipped => "skipped",
            };
            d.set_item(c.name, status)?;
        }
        d.set_item("passed", report.passed)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(a={}, r0={}, spectrum_k={:?}, k0={})",
            self.inner.observables().a(),
            self.inner.observables().r0(),
            self.inner.spectrum().ks(),
            self.inner.spectrum().k0()
        )
    }
}

/// Structureless cross section 4 pi a^2 / (1 + a^2 k^2).
#[pyfunction]
fn wigner_sigma(a: f64, k: f64) -> PyResult<f64> {
    baselines::wigner_sigma(a, k).map_err(model_err)
}

/// Effective-range expansion -1/a + (r0/2) k^2.
#[pyfunction]
fn effective_range_f(a: f64, r0: f64, k: f64) -> PyResult<f64> {
    baselines::effective_range_f(a, r0, k).map_err(model_err)
}

/// Zero-energy cross section of the delta-shell member at squeezing eps.
#[pyfunction]
fn delta_sigma(a: f64, r0: f64, eps: f64, attractive: bool) -> PyResult<f64> {
    baselines::delta_sigma(a, r0, eps, attractive).map_err(model_err)
}

#[pymodule]
fn pyzrp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(wigner_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(effective_range_f, m)?)?;
    m.add_function(wrap_pyfunction!(delta_sigma, m)?)?;
    Ok(())
}
