//! Python bindings: `import entpulse_py`.
//!
//! Vectors and matrices are returned as plain lists; complex couplings as
//! Python `complex`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use entpulse::config::RunConfig;
use entpulse::gaussian::{self, dynamics_from_couplings};
use entpulse::params::{self, DEFAULT_RATIO, DEFAULT_SOFT_RATIO};
use entpulse::protocol::{self, HomodyneSettings, SimultaneousOptions, SignalTrace};
use entpulse::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::RegimeViolation(_) | Error::Truncation { .. } | Error::Unphysical(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[pyclass(name = "PhysicalParams", from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: params::PhysicalParams,
}

#[pymethods]
impl PyParams {
    /// The indium-ion example.
    #[staticmethod]
    fn indium() -> Self {
        Self {
            inner: params::PhysicalParams::indium(),
        }
    }

    /// Parameters from `key = value` config text.
    #[staticmethod]
    fn from_config(text: &str) -> PyResult<Self> {
        let cfg = RunConfig::parse(text).map_err(to_py)?;
        Ok(Self {
            inner: cfg.params().map_err(to_py)?.clone(),
        })
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(to_py)
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.inner.nu
    }
    #[setter]
    fn set_nu(&mut self, v: f64) {
        self.inner.nu = v;
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[setter]
    fn set_gamma(&mut self, v: f64) {
        self.inner.gamma = v;
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }
    #[setter]
    fn set_delta(&mut self, v: f64) {
        self.inner.delta = v;
    }
    #[getter]
    fn omega_rabi(&self) -> f64 {
        self.inner.omega_rabi
    }
    #[setter]
    fn set_omega_rabi(&mut self, v: f64) {
        self.inner.omega_rabi = v;
    }
    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }
    #[setter]
    fn set_kappa(&mut self, v: f64) {
        self.inner.kappa = v;
    }
    #[getter]
    fn g1(&self) -> Complex64 {
        self.inner.g1
    }
    #[setter]
    fn set_g1(&mut self, v: Complex64) {
        self.inner.g1 = v;
    }
    #[getter]
    fn g2(&self) -> Complex64 {
        self.inner.g2
    }
    #[setter]
    fn set_g2(&mut self, v: Complex64) {
        self.inner.g2 = v;
    }
    #[getter]
    fn nbar_motion(&self) -> f64 {
        self.inner.nbar_motion
    }
    #[setter]
    fn set_nbar_motion(&mut self, v: f64) {
        self.inner.nbar_motion = v;
    }
    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass
    }
    #[getter]
    fn wavenumber(&self) -> f64 {
        self.inner.wavenumber
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(name = "Couplings", from_py_object)]
#[derive(Clone)]
struct PyCouplings {
    inner: params::Couplings,
}

#[pymethods]
impl PyCouplings {
    #[staticmethod]
    fn from_chi(chi1: Complex64, chi2: Complex64) -> PyResult<Self> {
        params::Couplings::from_chi(chi1, chi2, None)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// χ₁ = 1, χ₂ = r.
    #[staticmethod]
    fn unit_ratio(r: f64) -> PyResult<Self> {
        params::Couplings::unit_ratio(r).map(|inner| Self { inner }).map_err(to_py)
    }

    fn with_ratio(&self, r: f64) -> PyResult<Self> {
        self.inner.with_ratio(r).map(|inner| Self { inner }).map_err(to_py)
    }

    #[getter]
    fn chi1(&self) -> Complex64 {
        self.inner.chi1
    }
    #[getter]
    fn chi2(&self) -> Complex64 {
        self.inner.chi2
    }
    #[getter]
    fn eta(&self) -> Option<f64> {
        self.inner.eta
    }
    #[getter]
    fn r(&self) -> f64 {
        self.inner.r
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }
    #[getter]
    fn theta_rate(&self) -> Option<f64> {
        self.inner.theta_rate
    }
    #[getter]
    fn t_pi(&self) -> Option<f64> {
        self.inner.t_pi
    }
    #[getter]
    fn n_mean(&self) -> Option<f64> {
        self.inner.n_mean
    }

    fn __repr__(&self) -> String {
        format!(
            "Couplings(chi1={}, chi2={}, r={}, beta={})",
            self.inner.chi1, self.inner.chi2, self.inner.r, self.inner.beta
        )
    }
}

#[pyclass(name = "GaussianState", from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: gaussian::GaussianState,
}

#[pymethods]
impl PyState {
    #[new]
    fn new(labels: Vec<String>, mean: Vec<f64>, cov: Vec<Vec<f64>>) -> PyResult<Self> {
        let n = cov.len();
        if cov.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("covariance must be square"));
        }
        let flat: Vec<f64> = cov.into_iter().flatten().collect();
        gaussian::GaussianState::new(
            labels,
            nalgebra::DVector::from_vec(mean),
            nalgebra::DMatrix::from_row_slice(n, n, &flat),
        )
        .map(|inner| Self { inner })
        .map_err(to_py)
    }

    #[staticmethod]
    fn vacuum(labels: Vec<String>) -> PyResult<Self> {
        gaussian::GaussianState::vacuum_labeled(labels)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        gaussian::GaussianState::from_text(text)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }
    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.inner.mean().iter().copied().collect()
    }
    #[getter]
    fn cov(&self) -> Vec<Vec<f64>> {
        rows(self.inner.cov())
    }

    fn reduce(&self, labels: Vec<String>) -> PyResult<Self> {
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        self.inner.reduce(&refs).map(|inner| Self { inner }).map_err(to_py)
    }

    fn mean_photons(&self, label: &str) -> PyResult<f64> {
        self.inner.mean_photons(label).map_err(to_py)
    }

    fn symplectic_eigenvalues(&self) -> PyResult<Vec<f64>> {
        self.inner.symplectic_eigenvalues().map_err(to_py)
    }

    fn is_physical(&self) -> bool {
        self.inner.is_physical()
    }

    #[pyo3(signature = (mode_i, mode_j, theta_i = 0.0, theta_j = 0.0))]
    fn epr_variance(&self, mode_i: &str, mode_j: &str, theta_i: f64, theta_j: f64) -> PyResult<f64> {
        self.inner.epr_variance(mode_i, mode_j, theta_i, theta_j).map_err(to_py)
    }

    fn log_negativity(&self, side_a: Vec<String>, side_b: Vec<String>) -> PyResult<f64> {
        let a: Vec<&str> = side_a.iter().map(String::as_str).collect();
        let b: Vec<&str> = side_b.iter().map(String::as_str).collect();
        self.inner.log_negativity(&a, &b).map_err(to_py)
    }

    fn decorrelation_norm(&self, block_a: Vec<String>, block_b: Vec<String>) -> PyResult<f64> {
        let a: Vec<&str> = block_a.iter().map(String::as_str).collect();
        let b: Vec<&str> = block_b.iter().map(String::as_str).collect();
        self.inner.decorrelation_norm(&a, &b).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("GaussianState(labels={:?})", self.inner.labels())
    }
}

#[pyfunction]
fn coupling_constants(params: &PyParams) -> PyResult<PyCouplings> {
    params::coupling_constants(&params.inner)
        .map(|inner| PyCouplings { inner })
        .map_err(to_py)
}

/// `(passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (params, couplings, ratio = DEFAULT_RATIO, soft_ratio = DEFAULT_SOFT_RATIO))]
fn validate_regime(params: &PyParams, couplings: &PyCouplings, ratio: f64, soft_ratio: f64) -> (bool, String) {
    let rep = params::validate_regime(&params.inner, &couplings.inner, ratio, soft_ratio);
    (rep.pass(), rep.to_string())
}

#[pyfunction]
fn tmss(r: f64, beta: f64) -> PyResult<PyState> {
    gaussian::tmss(r, beta).map(|inner| PyState { inner }).map_err(to_py)
}

/// Evolves a `(cav1, cav2, motion)` state under the two-sideband drive.
#[pyfunction]
#[pyo3(signature = (state, chi1, chi2, t, kappa = 0.0))]
fn evolve(state: &PyState, chi1: Complex64, chi2: Complex64, t: f64, kappa: f64) -> PyResult<PyState> {
    let d = dynamics_from_couplings(chi1, chi2, kappa, kappa != 0.0);
    gaussian::evolve(&state.inner, &d, t)
        .map(|inner| PyState { inner })
        .map_err(to_py)
}

#[pyfunction]
fn bogoliubov_tpi(couplings: &PyCouplings) -> PyResult<Vec<Vec<f64>>> {
    gaussian::bogoliubov_tpi(&couplings.inner).map(|m| rows(&m)).map_err(to_py)
}

#[pyfunction]
fn initial_state(nbar_motion: f64) -> PyResult<PyState> {
    protocol::initial_state(nbar_motion)
        .map(|inner| PyState { inner })
        .map_err(to_py)
}

fn settings(theta1: f64, theta2: f64, kappa_dt: f64, t_max: f64, t_step: f64) -> HomodyneSettings {
    HomodyneSettings {
        theta1,
        theta2,
        kappa_dt,
        t_grid: HomodyneSettings::uniform_grid(t_max, t_step),
    }
}

fn trace_dict<'py>(py: Python<'py>, tr: &SignalTrace) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("r", tr.r)?;
    d.set_item("kappa_dt", tr.kappa_dt)?;
    d.set_item("theta_sum", tr.theta_sum)?;
    d.set_item("kappa_t", tr.times.clone())?;
    d.set_item("C", tr.c.clone())?;
    d.set_item("R", tr.big_r.clone())?;
    d.set_item("q1_sq", tr.q1_sq.clone())?;
    d.set_item("q1q2", tr.q1q2.clone())?;
    d.set_item("csv", tr.to_csv())?;
    Ok(d)
}

/// C(κt) for one set of couplings; times in units of 1/κ.
#[pyfunction]
#[pyo3(signature = (couplings, kappa = 1.0, theta1 = 0.0, theta2 = 0.0, kappa_dt = 0.1, t_max = 8.0, t_step = 0.02))]
#[allow(clippy::too_many_arguments)]
fn output_signal<'py>(
    py: Python<'py>,
    couplings: &PyCouplings,
    kappa: f64,
    theta1: f64,
    theta2: f64,
    kappa_dt: f64,
    t_max: f64,
    t_step: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let tr = protocol::output_signal(&couplings.inner, kappa, &settings(theta1, theta2, kappa_dt, t_max, t_step))
        .map_err(to_py)?;
    trace_dict(py, &tr)
}

#[pyfunction]
#[pyo3(signature = (r_list = None, theta1 = 0.0, theta2 = 0.0, kappa_dt = 0.1, t_max = 8.0, t_step = 0.02))]
fn fig3_sweep<'py>(
    py: Python<'py>,
    r_list: Option<Vec<f64>>,
    theta1: f64,
    theta2: f64,
    kappa_dt: f64,
    t_max: f64,
    t_step: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let r_list = r_list.unwrap_or_else(|| protocol::FIG3_R_VALUES.to_vec());
    let s = settings(theta1, theta2, kappa_dt, t_max, t_step);
    let traces = py.detach(|| protocol::fig3_sweep(&r_list, &s)).map_err(to_py)?;
    traces.iter().map(|t| trace_dict(py, t)).collect()
}

#[pyfunction]
#[pyo3(signature = (params, ratio = DEFAULT_RATIO, force = false, r_override = None, decay_during_drive = false))]
fn run_simultaneous<'py>(
    py: Python<'py>,
    params: &PyParams,
    ratio: f64,
    force: bool,
    r_override: Option<f64>,
    decay_during_drive: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = SimultaneousOptions {
        ratio,
        force,
        r_override,
        decay_during_drive,
        ..Default::default()
    };
    let run = protocol::run_simultaneous(&params.inner, &opts).map_err(to_py)?;
    let g = &run.diagnostics;
    let d = PyDict::new(py);
    d.set_item("couplings", PyCouplings { inner: run.couplings })?;
    d.set_item("duration", run.duration)?;
    d.set_item("mean_photons_cav1", g.mean_photons_cav1)?;
    d.set_item("mean_photons_cav2", g.mean_photons_cav2)?;
    d.set_item("mean_photons_motion", g.mean_photons_motion)?;
    d.set_item("log_negativity", g.log_negativity)?;
    d.set_item("epr_x", g.epr_x)?;
    d.set_item("epr_p", g.epr_p)?;
    d.set_item("epr_matched", g.epr_matched)?;
    d.set_item("motion_decorrelation", g.motion_decorrelation)?;
    d.set_item("tmss_deviation", g.tmss_deviation)?;
    d.set_item("regime", run.regime.as_ref().map(|r| r.to_string()))?;
    d.set_item("state", PyState { inner: run.state })?;
    Ok(d)
}

/// `delay` is T₁₂ in seconds (`float('inf')` for complete extraction).
#[pyfunction]
#[pyo3(signature = (params, t1, delay, swap_area = None))]
fn run_sequential<'py>(
    py: Python<'py>,
    params: &PyParams,
    t1: f64,
    delay: f64,
    swap_area: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let res = protocol::run_sequential(&params.inner, t1, delay, swap_area).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("squeeze", res.squeeze)?;
    d.set_item("transmittance", res.transmittance)?;
    d.set_item("swap_area", res.swap_area)?;
    d.set_item("stage_a_log_negativity", res.stage_a_log_negativity)?;
    d.set_item("final_log_negativity", res.final_log_negativity)?;
    d.set_item("pulse1_motion_log_negativity", res.pulse1_motion_log_negativity)?;
    d.set_item("motion_decorrelation", res.motion_decorrelation)?;
    d.set_item("state", PyState { inner: res.state })?;
    Ok(d)
}

type OracleRowTuple = (String, f64, f64);

/// Gaussian vs Fock comparison at χ₁ = 1, χ₂ = r; returns
/// `(max_diff, max_leakage, rows)` with rows `(observable, gaussian, fock)`.
#[pyfunction]
#[pyo3(signature = (r = 3.0, dims = None, leakage_tol = 1e-10))]
fn oracle_check(py: Python<'_>, r: f64, dims: Option<[usize; 3]>, leakage_tol: f64) -> PyResult<(f64, f64, Vec<OracleRowTuple>)> {
    let cmp = py.detach(|| protocol::oracle_check(r, dims, leakage_tol)).map_err(to_py)?;
    let rows = cmp.rows.iter().map(|row| (row.observable.clone(), row.gaussian, row.fock)).collect();
    Ok((cmp.max_diff(), cmp.propagation.max_leakage, rows))
}

#[pymodule]
fn entpulse_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyCouplings>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(coupling_constants, m)?)?;
    m.add_function(wrap_pyfunction!(validate_regime, m)?)?;
    m.add_function(wrap_pyfunction!(tmss, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(bogoliubov_tpi, m)?)?;
    m.add_function(wrap_pyfunction!(initial_state, m)?)?;
    m.add_function(wrap_pyfunction!(output_signal, m)?)?;
    m.add_function(wrap_pyfunction!(fig3_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_simultaneous, m)?)?;
    m.add_function(wrap_pyfunction!(run_sequential, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_check, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
