//! Python bindings. States are built from the same spec strings as the CLI
//! (`svs:r=0.4`, `coherent:0.3+0.2i`, ...); reports come back as dicts.

use cvtele_core::oracle::{self, GainConvention, OracleLattice};
use cvtele_core::states::{self, SamplingControls, StateHandle, StateSpec};
use cvtele_core::teleport::{self, TeleportJob};
use cvtele_core::{Complex64, Error};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(cvtele, CvteleError, PyException, "A numerical check or truncation guard failed.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parse { .. } => PyValueError::new_err(e.to_string()),
        other => CvteleError::new_err(format!("[{}/{}] {other}", other.module(), other.check_name())),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Grid and truncation settings for the characteristic-function engine.
#[pyclass(name = "Numerics", module = "cvtele", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyNumerics {
    inner: teleport::Numerics,
}

#[pymethods]
impl PyNumerics {
    #[new]
    #[pyo3(signature = (trunc = 20, half_width = 6.0, step = 0.1))]
    fn new(trunc: usize, half_width: f64, step: f64) -> PyResult<Self> {
        let inner = teleport::Numerics::new(trunc, half_width, step).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn trunc(&self) -> usize {
        self.inner.trunc
    }

    #[getter]
    fn half_width(&self) -> f64 {
        self.inner.half_width
    }

    #[getter]
    fn step(&self) -> f64 {
        self.inner.step
    }

    fn __repr__(&self) -> String {
        format!("Numerics(trunc={}, half_width={}, step={})", self.inner.trunc, self.inner.half_width, self.inner.step)
    }
}

fn numerics_or_default(n: Option<PyRef<'_, PyNumerics>>) -> teleport::Numerics {
    n.map(|n| n.inner).unwrap_or_default()
}

/// A one- or two-mode state at a fixed Fock truncation.
#[pyclass(name = "State", module = "cvtele", frozen)]
pub struct PyState {
    handle: StateHandle,
    trunc: usize,
}

impl PyState {
    fn fock(&self) -> PyResult<cvtele_core::FockDensityMatrix> {
        self.handle.to_fock(self.trunc).map_err(py_err)
    }
}

#[pymethods]
impl PyState {
    /// Builds `spec` with `trunc` levels per mode. Gaussian states too large
    /// for the truncation keep only their exact Gaussian form.
    #[new]
    #[pyo3(signature = (spec, trunc = 20))]
    fn new(spec: &str, trunc: usize) -> PyResult<Self> {
        let parsed: StateSpec = spec.parse().map_err(py_err)?;
        let handle = match states::build(&parsed, trunc) {
            Ok(h) => h,
            Err(e @ Error::Truncation { .. }) => match states::gaussian_form(&parsed).map_err(py_err)? {
                Some(g) => StateHandle::from_gaussian(g, parsed.to_string()),
                None => return Err(py_err(e)),
            },
            Err(e) => return Err(py_err(e)),
        };
        Ok(Self { handle, trunc })
    }

    #[getter]
    fn label(&self) -> &str {
        self.handle.label()
    }

    #[getter]
    fn modes(&self) -> usize {
        self.handle.modes()
    }

    #[getter]
    fn trunc(&self) -> usize {
        self.trunc
    }

    /// Row-major density matrix over the (truncated) Fock basis.
    fn density_matrix(&self) -> PyResult<Vec<Vec<Complex64>>> {
        let rho = self.fock()?;
        let m = rho.matrix();
        Ok((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect())
    }

    fn trace(&self) -> PyResult<f64> {
        Ok(self.fock()?.trace())
    }

    fn purity(&self) -> PyResult<f64> {
        Ok(self.fock()?.purity())
    }

    /// Characteristic function at one complex argument per mode.
    fn cf(&self, lam: Vec<Complex64>) -> PyResult<Complex64> {
        if lam.len() != self.handle.modes() {
            return Err(PyValueError::new_err(format!(
                "expected {} arguments, got {}",
                self.handle.modes(),
                lam.len()
            )));
        }
        Ok(self.handle.cf(&lam))
    }

    fn __repr__(&self) -> String {
        format!("State({:?}, trunc={})", self.handle.label(), self.trunc)
    }
}

fn job(input: &PyState, resource: &PyState, numerics: teleport::Numerics) -> PyResult<TeleportJob> {
    TeleportJob::new(input.handle.clone(), resource.handle.clone(), numerics).map_err(py_err)
}

/// Full protocol report for one input/resource pair, as a dict.
#[pyfunction]
#[pyo3(signature = (input, resource, numerics = None))]
fn run_protocol<'py>(
    py: Python<'py>,
    input: &PyState,
    resource: &PyState,
    numerics: Option<PyRef<'_, PyNumerics>>,
) -> PyResult<Bound<'py, PyAny>> {
    let report = teleport::run_protocol(&job(input, resource, numerics_or_default(numerics))?).map_err(py_err)?;
    json_to_py(py, &report.to_json())
}

/// Bob's output state under unit-gain teleportation.
#[pyfunction]
#[pyo3(signature = (input, resource, numerics = None))]
fn teleport_state(input: &PyState, resource: &PyState, numerics: Option<PyRef<'_, PyNumerics>>) -> PyResult<PyState> {
    let n = numerics_or_default(numerics);
    let out = teleport::teleport_cf(&job(input, resource, n)?).map_err(py_err)?;
    let label = format!("teleported({} via {})", input.handle.label(), resource.handle.label());
    Ok(PyState {
        handle: StateHandle::from_fock(out.rho().clone(), label),
        trunc: n.trunc,
    })
}

/// Brute-force measure-and-displace teleportation. Returns the output state
/// and the probability deficit of the outcome lattice.
#[pyfunction]
#[pyo3(signature = (input, resource, gain = "sqrt2"))]
fn oracle_teleport(input: &PyState, resource: &PyState, gain: &str) -> PyResult<(PyState, f64)> {
    let gain: GainConvention = gain.parse().map_err(py_err)?;
    let dim = input.trunc.min(resource.trunc);
    let rho_in = input.handle.to_fock(dim).map_err(py_err)?;
    let rho_ab = resource.handle.to_fock(dim).map_err(py_err)?;
    let out = oracle::oracle_teleport(&rho_in, &rho_ab, &OracleLattice::default(), gain).map_err(py_err)?;
    let deficit = out.probability_deficit();
    let label = format!("oracle({} via {})", input.handle.label(), resource.handle.label());
    Ok((
        PyState {
            handle: StateHandle::from_fock(out.rho, label),
            trunc: dim,
        },
        deficit,
    ))
}

/// Uhlmann fidelity between two states at the smaller truncation.
#[pyfunction]
fn fidelity(a: &PyState, b: &PyState) -> PyResult<f64> {
    let dim = a.trunc.min(b.trunc);
    let ra = a.handle.to_fock(dim).map_err(py_err)?;
    let rb = b.handle.to_fock(dim).map_err(py_err)?;
    teleport::fidelity(&ra.normalized(), &rb.normalized()).map_err(py_err)
}

/// (added_noise, delta_epr) for a resource.
#[pyfunction]
#[pyo3(signature = (resource, numerics = None))]
fn added_noise(resource: &PyState, numerics: Option<PyRef<'_, PyNumerics>>) -> PyResult<(f64, f64)> {
    let n = numerics_or_default(numerics);
    let a = match resource.handle.gaussian() {
        Some(g) => teleport::added_noise_gaussian(g),
        None => teleport::added_noise(&resource.handle, &n),
    }
    .map_err(py_err)?;
    Ok((a.added_noise, a.delta_epr))
}

#[pyfunction]
fn epr_uncertainty(resource: &PyState) -> PyResult<f64> {
    teleport::epr_uncertainty(&resource.handle).map_err(py_err)
}

/// Average fidelity for coherent inputs.
#[pyfunction]
#[pyo3(signature = (resource, numerics = None))]
fn fidelity_coherent(resource: &PyState, numerics: Option<PyRef<'_, PyNumerics>>) -> PyResult<f64> {
    teleport::fidelity_coherent_quadrature(&resource.handle, &numerics_or_default(numerics)).map_err(py_err)
}

/// (sqq, sqp, spp) of the distorting state, from the resource correlations.
#[pyfunction]
fn distorting_covariance(resource: &PyState) -> PyResult<(f64, f64, f64)> {
    let cm = teleport::cm_from_resource(&resource.handle).map_err(py_err)?;
    Ok((cm.sqq, cm.sqp, cm.spp))
}

#[pyfunction]
fn svs_entropy(r: f64) -> f64 {
    states::svs_entropy(r)
}

#[pyfunction]
fn frontier_delta(bits: f64) -> f64 {
    states::frontier_delta(bits)
}

#[pyfunction]
#[pyo3(signature = (count, seed = 42))]
fn sample_resources(count: usize, seed: u64) -> Vec<String> {
    states::sample_pure_resources(count, seed, &SamplingControls::default())
        .iter()
        .map(ToString::to_string)
        .collect()
}

/// Entanglement/EPR frontier points for the given pure resources.
#[pyfunction]
#[pyo3(signature = (specs, trunc = 20))]
fn frontier<'py>(py: Python<'py>, specs: Vec<String>, trunc: usize) -> PyResult<Bound<'py, PyAny>> {
    let parsed = specs
        .iter()
        .map(|s| s.parse::<StateSpec>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(py_err)?;
    let points = states::frontier(&parsed, trunc).map_err(py_err)?;
    let text = serde_json::to_string(&points).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &text)
}

#[pymodule]
fn cvtele(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CvteleError", m.py().get_type::<CvteleError>())?;
    m.add_class::<PyNumerics>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(run_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(teleport_state, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_teleport, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(added_noise, m)?)?;
    m.add_function(wrap_pyfunction!(epr_uncertainty, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity_coherent, m)?)?;
    m.add_function(wrap_pyfunction!(distorting_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(svs_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(frontier_delta, m)?)?;
    m.add_function(wrap_pyfunction!(sample_resources, m)?)?;
    m.add_function(wrap_pyfunction!(frontier, m)?)?;
    Ok(())
}
