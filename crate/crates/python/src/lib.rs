//! Python module `octant`: parse models, certify them, and run the oracle.

use octant_core::certifier::{self, CertifyConfig, DisjointnessMode};
use octant_core::oracle::run_oracle;
use octant_core::stepmodel;
use octant_core::walkgroup::{self, DEFAULT_GROUP_CAP};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_loads<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// A set of steps in {-1,0,1}^3 without the origin.
#[pyclass(module = "octant", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StepSet {
    inner: stepmodel::StepSet,
}

#[pymethods]
impl StepSet {
    /// Parse "(a,b,c),..." or a "0x" hex id.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(|inner| StepSet { inner }).map_err(value_error)
    }

    #[staticmethod]
    fn from_id(id: u32) -> PyResult<Self> {
        stepmodel::StepSet::from_id(id).map(|inner| StepSet { inner }).map_err(value_error)
    }

    #[getter]
    fn id(&self) -> u32 {
        self.inner.id()
    }

    #[getter]
    fn hex_id(&self) -> String {
        self.inner.hex_id()
    }

    #[getter]
    fn steps(&self) -> Vec<(i8, i8, i8)> {
        self.inner.steps().map(|s| s.components().into()).collect()
    }

    /// Representative with the smallest id under coordinate permutations.
    fn canonical(&self) -> Self {
        StepSet { inner: self.inner.axis_canonical() }
    }

    fn is_canonical(&self) -> bool {
        self.inner.is_canonical()
    }

    /// The step polynomial as text.
    fn step_polynomial(&self) -> String {
        walkgroup::step_polynomial(&self.inner).to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("StepSet('{}')", self.inner)
    }
}

/// Result of `certify`.
#[pyclass(module = "octant", frozen)]
pub struct Certificate {
    inner: certifier::Certificate,
}

#[pymethods]
impl Certificate {
    /// Parse a certificate from its JSON text.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        certifier::Certificate::from_json(text).map(|inner| Certificate { inner }).map_err(value_error)
    }

    #[getter]
    fn model(&self) -> StepSet {
        StepSet { inner: self.inner.model }
    }

    /// Verdict name, e.g. "CertifiedDFinite".
    #[getter]
    fn verdict(&self) -> &'static str {
        self.inner.verdict.name()
    }

    /// Offending element word for an obstructed verdict.
    #[getter]
    fn obstruction(&self) -> Option<String> {
        match &self.inner.verdict {
            certifier::Verdict::Obstructed(w) => Some(w.to_string()),
            _ => None,
        }
    }

    #[getter]
    fn exit_code(&self) -> i32 {
        self.inner.verdict.exit_code()
    }

    #[getter]
    fn group_order(&self) -> Option<usize> {
        self.inner.group_order
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_loads(py, &self.inner.to_json())
    }

    /// Path of the first field that fails an independent recheck, or None.
    fn mismatch(&self) -> Option<String> {
        certifier::verify_certificate(&self.inner).err().map(|e| e.to_string())
    }

    fn verify(&self) -> bool {
        certifier::verify_certificate(&self.inner).is_ok()
    }

    fn __repr__(&self) -> String {
        format!("Certificate({}, {})", self.inner.model.hex_id(), self.inner.verdict)
    }
}

fn model_arg(model: &Bound<'_, PyAny>) -> PyResult<stepmodel::StepSet> {
    if let Ok(s) = model.cast::<StepSet>() {
        return Ok(s.get().inner);
    }
    if let Ok(id) = model.extract::<u32>() {
        return stepmodel::StepSet::from_id(id).map_err(value_error);
    }
    let text: String = model.extract()?;
    text.parse().map_err(value_error)
}

fn config(group_cap: usize, mode: &str, zero_orbit_sum_gate: bool) -> PyResult<CertifyConfig> {
    if group_cap == 0 {
        return Err(PyValueError::new_err("group_cap must be at least 1"));
    }
    Ok(CertifyConfig {
        group_cap,
        mode: mode.parse::<DisjointnessMode>().map_err(value_error)?,
        zero_orbit_sum_gate,
        ..CertifyConfig::default()
    })
}

/// Certify a model given as StepSet, step-list text, hex text, or integer id.
#[pyfunction]
#[pyo3(signature = (model, group_cap = DEFAULT_GROUP_CAP, mode = "positivity", zero_orbit_sum_gate = true))]
fn certify(py: Python<'_>, model: &Bound<'_, PyAny>, group_cap: usize, mode: &str, zero_orbit_sum_gate: bool) -> PyResult<Certificate> {
    let s = model_arg(model)?;
    let cfg = config(group_cap, mode, zero_orbit_sum_gate)?;
    Ok(Certificate { inner: py.detach(|| certifier::certify(&s, &cfg)) })
}

/// Check a certificate given as JSON text.
#[pyfunction]
fn verify_certificate(text: &str) -> PyResult<bool> {
    let cert = certifier::Certificate::from_json(text).map_err(value_error)?;
    Ok(certifier::verify_certificate(&cert).is_ok())
}

/// Group of the walk as a dict with words, signs and maps.
#[pyfunction]
#[pyo3(signature = (model, group_cap = DEFAULT_GROUP_CAP))]
fn group_info<'py>(py: Python<'py>, model: &Bound<'py, PyAny>, group_cap: usize) -> PyResult<Bound<'py, PyAny>> {
    let s = model_arg(model)?;
    if group_cap == 0 {
        return Err(PyValueError::new_err("group_cap must be at least 1"));
    }
    let group = walkgroup::close_group(&s, group_cap).map_err(value_error)?;
    let elements: Vec<_> = group
        .elements
        .iter()
        .map(|e| serde_json::json!({"word": e.word.to_string(), "sign": e.sign, "map": e.map.to_string()}))
        .collect();
    let orbit = group.is_finite().then(|| walkgroup::orbit_sum(&group));
    let value = serde_json::json!({
        "finite": group.is_finite(),
        "order": group.order,
        "elements": elements,
        "orbit_sum": orbit.as_ref().map(|o| o.value.to_string()),
        "orbit_sum_is_zero": orbit.as_ref().map(|o| o.is_zero),
    });
    json_loads(py, &value.to_string())
}

/// Orbit-identity and positive-part checks up to walk length `n_max`.
#[pyfunction]
#[pyo3(signature = (model, n_max = 8, group_cap = DEFAULT_GROUP_CAP, mode = "positivity"))]
fn oracle<'py>(py: Python<'py>, model: &Bound<'py, PyAny>, n_max: usize, group_cap: usize, mode: &str) -> PyResult<Bound<'py, PyAny>> {
    let s = model_arg(model)?;
    let cfg = config(group_cap, mode, true)?;
    let report = py.detach(|| run_oracle(&s, &cfg, n_max));
    json_loads(py, &serde_json::to_string(&report).map_err(value_error)?)
}

#[pymodule]
fn octant(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<StepSet>()?;
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(group_info, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add("DEFAULT_GROUP_CAP", DEFAULT_GROUP_CAP)?;
    Ok(())
}
