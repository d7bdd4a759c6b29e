//! Python module `aplab`: function handles, classification, decay
//! profiles, norms, metrics and ω-limit sampling. Structured results are
//! returned as JSON strings.

use std::path::PathBuf;

use aplab_core::bounds;
use aplab_core::builders;
use aplab_core::classify::{self as cls, ClassifyConfig, ScheduleConfig, Verdict};
use aplab_core::dynamics::{self, OmegaConfig, TheoremConfig};
use aplab_core::function::io::{load_sampled_csv, parse_expr_document};
use aplab_core::metrics::{self, PNormConfig, SupMinEvalConfig};
use aplab_core::{quadrature, FunctionHandle, LabError, TimeDomain};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: LabError) -> PyErr {
    match e {
        LabError::Accuracy { .. } | LabError::Consistency(_) | LabError::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(format!("line {}: {e}", e.line()))
}

fn config<T: Default + serde::de::DeserializeOwned>(text: Option<&str>) -> PyResult<T> {
    text.map_or_else(|| Ok(T::default()), |t| serde_json::from_str(t).map_err(json_err))
}

fn domain(name: &str) -> PyResult<TimeDomain> {
    match name {
        "half_line" => Ok(TimeDomain::HalfLine),
        "full_line" => Ok(TimeDomain::FullLine),
        other => Err(PyValueError::new_err(format!("unknown domain {other:?}, expected half_line or full_line"))),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// An immutable function on the half-line or the line.
#[pyclass(name = "Function", frozen, skip_from_py_object)]
struct PyFunction(FunctionHandle);

#[pymethods]
impl PyFunction {
    /// A canned function by name; see `builder_names()`.
    #[staticmethod]
    fn builder(name: &str) -> PyResult<Self> {
        builders::by_name(name).map(PyFunction).map_err(err)
    }

    /// An expression document (JSON text).
    #[staticmethod]
    fn from_expr(text: &str) -> PyResult<Self> {
        parse_expr_document(text).map(PyFunction).map_err(err)
    }

    /// Samples from a CSV file with header `t,value[,...]`.
    #[staticmethod]
    #[pyo3(signature = (path, domain_name = "half_line"))]
    fn from_csv(path: PathBuf, domain_name: &str) -> PyResult<Self> {
        load_sampled_csv(&path, domain(domain_name)?).map(PyFunction).map_err(err)
    }

    /// `sum a sin(ω t + φ)` from `(a, ω, φ)` triples.
    #[staticmethod]
    #[pyo3(signature = (terms, domain_name = "half_line"))]
    fn trig_polynomial(terms: Vec<(f64, f64, f64)>, domain_name: &str) -> PyResult<Self> {
        Ok(PyFunction(builders::trig_polynomial(domain(domain_name)?, &terms)))
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn domain(&self) -> &'static str {
        match self.0.domain() {
            TimeDomain::HalfLine => "half_line",
            TimeDomain::FullLine => "full_line",
        }
    }

    fn __call__(&self, t: f64) -> PyResult<Vec<f64>> {
        self.0.evaluate(t).map_err(err)
    }

    /// The translate `t ↦ f(t + h)`.
    fn translate(&self, h: f64) -> PyResult<Self> {
        self.0.translate(h).map(PyFunction).map_err(err)
    }

    fn derivative(&self) -> PyResult<Self> {
        self.0.differentiate().map(PyFunction).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Function({:?}, dim={})", self.0.name(), self.0.dim())
    }
}

#[pyfunction]
fn builder_names() -> Vec<&'static str> {
    builders::BUILDER_NAMES.to_vec()
}

/// Full class report as JSON; `config` is a JSON classify configuration.
#[pyfunction]
#[pyo3(signature = (f, config = None))]
fn classify(py: Python<'_>, f: &PyFunction, config: Option<&str>) -> PyResult<String> {
    let cfg: ClassifyConfig = self::config(config)?;
    let report = py.detach(|| cls::classify(&f.0, &cfg)).map_err(err)?;
    report.to_json().map_err(err)
}

fn verdict_name(v: Verdict) -> String {
    match v {
        Verdict::DecaysBelow { threshold } => format!("decays_below({threshold})"),
        Verdict::Stagnates { floor } => format!("stagnates({floor})"),
        Verdict::Inconclusive => "inconclusive".into(),
    }
}

/// `(records, verdict)` for the window sups of `|f(t+τ) − f(t)|`; with
/// `ell` the unit-window `L^p` discrepancy is used instead.
#[pyfunction]
#[pyo3(signature = (f, tau, schedule = None, resolution = 20, ell = None, p = 2.0))]
fn remote_period_decay(
    py: Python<'_>,
    f: &PyFunction,
    tau: f64,
    schedule: Option<&str>,
    resolution: usize,
    ell: Option<f64>,
    p: f64,
) -> PyResult<(Vec<(f64, f64)>, String)> {
    let sched: ScheduleConfig = config(schedule)?;
    let profile = py
        .detach(|| match ell {
            None => cls::remote_period_decay(&f.0, tau, &sched, resolution),
            Some(ell) => PNormConfig::new(p, 100).and_then(|c| cls::sp_remote_period_decay(&f.0, tau, ell, &c, &sched)),
        })
        .map_err(err)?;
    Ok((profile.records, verdict_name(profile.verdict)))
}

/// `(value, attained_at)` of `sup_t (∫_t^{t+1} |f|^p)^{1/p}` over `[0, t_max]`.
#[pyfunction]
#[pyo3(signature = (f, p = 2.0, t_max = 100.0, samples_per_unit = 100))]
fn stepanov_norm(py: Python<'_>, f: &PyFunction, p: f64, t_max: f64, samples_per_unit: usize) -> PyResult<(f64, f64)> {
    let cfg = PNormConfig::new(p, samples_per_unit).map_err(err)?;
    let n = py.detach(|| metrics::stepanov_norm(&f.0, &cfg, t_max)).map_err(err)?;
    Ok((n.value, n.attained_at))
}

#[pyfunction]
#[pyo3(signature = (f, g, l_values = None, resolution = 50))]
fn compact_open_distance(f: &PyFunction, g: &PyFunction, l_values: Option<Vec<f64>>, resolution: usize) -> PyResult<f64> {
    let sup = l_values.map_or_else(|| Ok(SupMinEvalConfig::default()), SupMinEvalConfig::new).map_err(err)?;
    metrics::compact_open_distance(&f.0, &g.0, &sup, resolution).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, g, p = 2.0, l_values = None))]
fn stepanov_metric(f: &PyFunction, g: &PyFunction, p: f64, l_values: Option<Vec<f64>>) -> PyResult<f64> {
    let sup = l_values.map_or_else(|| Ok(SupMinEvalConfig::default()), SupMinEvalConfig::new).map_err(err)?;
    let cfg = PNormConfig::new(p, 100).map_err(err)?;
    metrics::stepanov_metric(&f.0, &g.0, &cfg, &sup).map_err(err)
}

/// `∫_0^t f`, per component.
#[pyfunction]
#[pyo3(signature = (f, t, tol = 1e-9))]
fn primitive(f: &PyFunction, t: f64, tol: f64) -> PyResult<Vec<f64>> {
    quadrature::primitive(&f.0, t, tol).map_err(err)
}

/// Clustered ω-limit candidates as JSON; `config` is a JSON orbit configuration.
#[pyfunction]
#[pyo3(signature = (f, config = None))]
fn omega_limit(py: Python<'_>, f: &PyFunction, config: Option<&str>) -> PyResult<String> {
    let o: OmegaConfig = self::config(config)?;
    o.validate().map_err(err)?;
    let cluster = py
        .detach(|| {
            let sample = dynamics::orbit_samples(&f.0, &o.times(), o.l_view, o.resolution, o.metric)?;
            dynamics::omega_limit_candidates(&sample, o.radius, o.tau_range)
        })
        .map_err(err)?;
    to_json(&cluster)
}

/// Checks whether the primitive of `phi` lands in the predicted class.
#[pyfunction]
#[pyo3(signature = (phi, config = None))]
fn theorem_check(py: Python<'_>, phi: &PyFunction, config: Option<&str>) -> PyResult<String> {
    let cfg: TheoremConfig = self::config(config)?;
    let report = py.detach(|| dynamics::primitive_theorem_check(&phi.0, &cfg)).map_err(err)?;
    to_json(&report)
}

/// `ln(1 + 2π/(1+t))`.
#[pyfunction]
fn ex4_1_bound(t: f64) -> f64 {
    bounds::ex4_1_bound(t)
}

/// `τ(2t+τ)/D` with the three-term denominator `D`.
#[pyfunction]
fn ex4_2_bound(t: f64, tau: f64) -> f64 {
    bounds::ex4_2_bound_corrected(t, tau)
}

#[pymodule]
fn aplab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFunction>()?;
    m.add_function(wrap_pyfunction!(builder_names, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(remote_period_decay, m)?)?;
    m.add_function(wrap_pyfunction!(stepanov_norm, m)?)?;
    m.add_function(wrap_pyfunction!(compact_open_distance, m)?)?;
    m.add_function(wrap_pyfunction!(stepanov_metric, m)?)?;
    m.add_function(wrap_pyfunction!(primitive, m)?)?;
    m.add_function(wrap_pyfunction!(omega_limit, m)?)?;
    m.add_function(wrap_pyfunction!(theorem_check, m)?)?;
    m.add_function(wrap_pyfunction!(ex4_1_bound, m)?)?;
    m.add_function(wrap_pyfunction!(ex4_2_bound, m)?)?;
    Ok(())
}
