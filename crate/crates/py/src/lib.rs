//! Python bindings: parse specifications, analyze them, build transition
//! systems, check properties and simulate runs.

use std::sync::Arc;

use ::ckab as core;
use core::checker::ModelChecker;
use core::dsl;
use core::engine::{HashBackend, ServiceBackend, TableBackend};
use core::statespace::{self, BuildConfig, BuildError, ExportFormat};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_error(file: &str, d: dsl::Diagnostics) -> PyErr {
    PyValueError::new_err(d.render(file))
}

fn build_error(e: BuildError) -> PyErr {
    match e {
        BuildError::RunBound(v) => PyRuntimeError::new_err(v.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json_value(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

/// `((function, args), value)`.
type ServiceEntry = ((String, Vec<String>), String);

/// A parsed and validated CKAB specification.
#[pyclass(name = "Spec", frozen)]
struct PySpec {
    inner: dsl::CkabSpec,
}

#[pymethods]
impl PySpec {
    /// Parses `.ckab` text; raises ValueError with positioned diagnostics.
    #[staticmethod]
    #[pyo3(signature = (text, file = "<string>"))]
    fn parse(text: &str, file: &str) -> PyResult<Self> {
        let parsed = dsl::parse_spec(text).map_err(|d| value_error(file, d))?;
        Ok(PySpec {
            inner: parsed.value,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    fn __str__(&self) -> String {
        dsl::print_spec(&self.inner)
    }

    #[getter]
    fn digest(&self) -> String {
        statespace::spec_digest(&self.inner)
    }

    #[getter]
    fn actions(&self) -> Vec<String> {
        self.inner.actions.iter().map(|a| a.name.clone()).collect()
    }

    /// `(weakly_acyclic, cycle)` where the cycle lists positions like
    /// `hasTTD.2`.
    fn analyze(&self) -> (bool, Option<Vec<String>>) {
        let r = statespace::check_weak_acyclicity(&self.inner);
        let cycle = r.cycle.map(|c| c.iter().map(ToString::to_string).collect());
        (r.weakly_acyclic, cycle)
    }

    /// Builds the transition system. `constants` adds values that
    /// properties mention to the abstract domain.
    #[pyo3(signature = (k = None, state_cap = 100_000, bound = None, threads = None, constants = Vec::new()))]
    fn build(
        &self,
        py: Python<'_>,
        k: Option<usize>,
        state_cap: usize,
        bound: Option<usize>,
        threads: Option<usize>,
        constants: Vec<String>,
    ) -> PyResult<PyTransitionSystem> {
        let config = BuildConfig {
            k,
            state_cap,
            bound,
            threads,
            extra_constants: constants.into_iter().collect(),
            ..BuildConfig::default()
        };
        let spec = &self.inner;
        let ts = py
            .detach(|| statespace::build(spec, &config))
            .map_err(build_error)?;
        Ok(PyTransitionSystem {
            spec: spec.clone(),
            inner: ts,
        })
    }

    /// A concrete run as a list of dicts with `action`, `ctx`, `abox` and
    /// `scmap`. `table` maps `(function, args)` to a value; without it,
    /// services answer with a seeded hash.
    #[pyo3(signature = (steps = 10, seed = 0, table = None))]
    fn simulate(
        &self,
        py: Python<'_>,
        steps: usize,
        seed: u64,
        table: Option<Vec<ServiceEntry>>,
    ) -> PyResult<Py<PyAny>> {
        let backend: Arc<dyn ServiceBackend> = match table {
            None => Arc::new(HashBackend::new(seed, Vec::new())),
            Some(entries) => {
                let mut t = TableBackend::new();
                for ((f, args), v) in &entries {
                    let args: Vec<&str> = args.iter().map(String::as_str).collect();
                    t.insert(f, &args, v);
                }
                Arc::new(t)
            }
        };
        let trace = statespace::simulate(&self.inner, backend, steps, seed).map_err(build_error)?;
        json_value(
            py,
            &serde_json::to_string(&trace).expect("serializable trace"),
        )
    }
}

/// The outcome of checking one property.
#[pyclass(name = "CheckResult", frozen, get_all)]
struct PyCheckResult {
    holds: bool,
    /// States satisfying the property.
    extent: Vec<usize>,
    /// Explaining path, when the verdict depends on a run.
    witness: Option<Vec<usize>>,
    loop_to: Option<usize>,
    bindings: Vec<(String, String)>,
    witness_text: Option<String>,
    /// Closed subformulas with their extents.
    subformulas: Vec<(String, Vec<usize>)>,
}

#[pymethods]
impl PyCheckResult {
    fn __repr__(&self) -> String {
        let holds = if self.holds { "True" } else { "False" };
        match &self.witness_text {
            Some(w) => format!("CheckResult(holds={holds}, witness='{w}')"),
            None => format!("CheckResult(holds={holds})"),
        }
    }
}

#[pyclass(name = "TransitionSystem", frozen)]
struct PyTransitionSystem {
    spec: dsl::CkabSpec,
    inner: statespace::TransitionSystem,
}

#[pymethods]
impl PyTransitionSystem {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn complete(&self) -> bool {
        self.inner.is_complete()
    }

    #[getter]
    fn initial(&self) -> usize {
        self.inner.initial()
    }

    fn successors(&self, state: usize) -> PyResult<Vec<usize>> {
        if state >= self.inner.len() {
            return Err(PyValueError::new_err(format!(
                "state {state} does not exist"
            )));
        }
        Ok(self.inner.successors(state).to_vec())
    }

    fn state(&self, state: usize) -> PyResult<String> {
        if state >= self.inner.len() {
            return Err(PyValueError::new_err(format!(
                "state {state} does not exist"
            )));
        }
        Ok(self.inner.state(state).to_string())
    }

    fn stats(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        json_value(
            py,
            &serde_json::to_string(&self.inner.stats()).expect("serializable stats"),
        )
    }

    /// `"dot"` or `"json"`.
    #[pyo3(signature = (format = "json"))]
    fn export(&self, format: &str) -> PyResult<String> {
        let fmt: ExportFormat = format.parse().map_err(PyValueError::new_err)?;
        Ok(self.inner.export(fmt))
    }

    /// Checks one property given in the `.mu` syntax.
    fn check(&self, py: Python<'_>, property: &str) -> PyResult<PyCheckResult> {
        let parsed = dsl::parse_property(property).map_err(|d| value_error("<property>", d))?;
        let f = parsed.value;
        let problems: Vec<_> = dsl::validate_property(&self.spec, &f, dsl::Pos::start())
            .into_iter()
            .filter(dsl::Diagnostic::is_error)
            .collect();
        if !problems.is_empty() {
            return Err(value_error("<property>", dsl::Diagnostics(problems)));
        }
        let ts = &self.inner;
        let r = py
            .detach(|| ModelChecker::new(ts).and_then(|mut mc| mc.check(&f)))
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let witness_text = r.witness.as_ref().map(ToString::to_string);
        let (witness, loop_to, bindings) = match r.witness {
            Some(w) => (Some(w.path), w.loop_to, w.bindings),
            None => (None, None, Vec::new()),
        };
        Ok(PyCheckResult {
            holds: r.holds,
            extent: r.extent.iter().collect(),
            witness,
            loop_to,
            bindings,
            witness_text,
            subformulas: r
                .subformulas
                .into_iter()
                .map(|s| (s.formula, s.states.iter().collect()))
                .collect(),
        })
    }
}

/// Canonical printing of a property, after parsing and validation of its
/// syntax.
#[pyfunction]
fn normalize_property(text: &str) -> PyResult<String> {
    let parsed = dsl::parse_property(text).map_err(|d| value_error("<property>", d))?;
    Ok(dsl::print_formula(&parsed.value))
}

#[pymodule]
#[pyo3(name = "ckab")]
fn ckab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PyTransitionSystem>()?;
    m.add_class::<PyCheckResult>()?;
    m.add_function(wrap_pyfunction!(normalize_property, m)?)?;
    Ok(())
}
