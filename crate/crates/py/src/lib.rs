//! Python bindings. Exposes family instances with classification, Darboux
//! checks and search, numerical integration, plus the full command line as
//! `run_cli`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use painleve_core::catalog::{self, FamilyTag, InstanceOptions, ParamAssignment, PainleveInstance};
use painleve_core::dvariety::{darboux_search, verify_darboux, SearchBounds};
use painleve_core::exactfield::parse_phase;
use painleve_core::numint::{self, PathSpec, TrajectoryStatus};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One member of a Painlevé family with concrete parameters.
#[pyclass(name = "Instance", module = "painleve")]
struct PyInstance {
    inner: PainleveInstance,
}

#[pymethods]
impl PyInstance {
    /// `params` maps names (alpha, v1, a1, ...) to rational strings or
    /// `sym:NAME` for a transcendental.
    #[new]
    #[pyo3(signature = (family, params = None, p6_standard = false, p1_corrected = false))]
    fn new(
        family: &str,
        params: Option<BTreeMap<String, String>>,
        p6_standard: bool,
        p1_corrected: bool,
    ) -> PyResult<Self> {
        let tag: FamilyTag = family.parse().map_err(value_error)?;
        let specs: Vec<(String, String)> = params.unwrap_or_default().into_iter().collect();
        let params = ParamAssignment::from_specs(&specs).map_err(value_error)?;
        let options = InstanceOptions {
            p6_standard_form: p6_standard,
            p1_corrected_hamiltonian: p1_corrected,
        };
        let inner = catalog::instantiate_with(tag, &params, options).map_err(value_error)?;
        Ok(PyInstance { inner })
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family.name()
    }

    /// y'' as a string, or None for system-only variants.
    #[getter]
    fn second_order(&self) -> Option<String> {
        self.inner.second_order.as_ref().map(|r| r.to_string())
    }

    /// (y', x') as strings, or None when the family has no system form.
    #[getter]
    fn system(&self) -> Option<(String, String)> {
        self.inner.system.as_ref().map(|(f, g)| (f.to_string(), g.to_string()))
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.inner.notes.clone()
    }

    /// Returns a dict with `verdict`, `witnesses` and `citation`.
    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = catalog::classify(self.inner.family, &self.inner.params).map_err(value_error)?;
        let out = PyDict::new_bound(py);
        out.set_item("verdict", format!("{:?}", r.verdict))?;
        out.set_item("witnesses", r.witnesses)?;
        out.set_item("citation", r.citation)?;
        Ok(out)
    }

    /// Cofactor G with D(P) = G·P, or None when P is not invariant.
    fn verify_invariant(&self, poly: &str) -> PyResult<Option<String>> {
        let d = self.derivation()?;
        let p = parse_phase(poly, d.table()).map_err(value_error)?;
        Ok(verify_darboux(d, &p).ok().map(|c| c.cofactor().to_string()))
    }

    /// Invariant curves within the given degree bounds as (P, G) pairs.
    #[pyo3(signature = (deg_xy = 2, deg_t = 1, cofactor_box = 3))]
    fn darboux_search(&self, deg_xy: u32, deg_t: u32, cofactor_box: u32) -> PyResult<Vec<(String, String)>> {
        let d = self.derivation()?;
        let (cleared, _) = d.clear_denominators().map_err(value_error)?;
        let report = darboux_search(&cleared, &SearchBounds::new(deg_xy, deg_t, cofactor_box)).map_err(value_error)?;
        report
            .certificates
            .iter()
            .map(|c| {
                let own = verify_darboux(d, c.p()).map_err(value_error)?;
                Ok((own.p().to_string(), own.cofactor().to_string()))
            })
            .collect()
    }

    /// Integrates from `path`'s first waypoint. `path` is a comma list of
    /// complex numbers such as "0, 1, 1+1i". Returns a dict with `status`,
    /// `t`, `y`, `x` and, for poles, `t_estimate`.
    #[pyo3(signature = (y0, x0, path, tol = 1e-10))]
    fn integrate<'py>(
        &self,
        py: Python<'py>,
        y0: Complex64,
        x0: Complex64,
        path: &str,
        tol: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let path = PathSpec::parse(path).map_err(value_error)?;
        let t0 = path.waypoints()[0];
        let traj = numint::integrate(&self.inner, (t0, y0, x0), &path, tol).map_err(value_error)?;
        let out = PyDict::new_bound(py);
        match traj.status {
            TrajectoryStatus::Completed => out.set_item("status", "completed")?,
            TrajectoryStatus::PoleDetected { t_estimate } => {
                out.set_item("status", "pole")?;
                out.set_item("t_estimate", t_estimate)?;
            }
            TrajectoryStatus::SingularityAborted { t } => {
                out.set_item("status", "aborted")?;
                out.set_item("t_estimate", t)?;
            }
        }
        out.set_item("t", traj.samples.iter().map(|s| s.t).collect::<Vec<_>>())?;
        out.set_item("y", traj.samples.iter().map(|s| s.y).collect::<Vec<_>>())?;
        out.set_item("x", traj.samples.iter().map(|s| s.x).collect::<Vec<_>>())?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        let params: Vec<String> = self.inner.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("Instance({}, {})", self.inner.family.name(), params.join(", "))
    }
}

impl PyInstance {
    fn derivation(&self) -> PyResult<&painleve_core::dvariety::DVectorField> {
        self.inner
            .derivation
            .as_ref()
            .ok_or_else(|| PyValueError::new_err("this variant has no polynomial system form"))
    }
}

/// Runs the command line with `args` (without the program name) and
/// returns (exit code, stdout, stderr).
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let argv = std::iter::once("painleve".to_string()).chain(args);
    let out = painleve_core::cli::run(argv);
    (out.code, out.stdout, out.stderr)
}

/// Names of all supported families.
#[pyfunction]
fn families() -> Vec<&'static str> {
    FamilyTag::ALL.iter().map(|f| f.name()).collect()
}

#[pymodule]
fn painleve(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add_function(wrap_pyfunction!(families, m)?)?;
    Ok(())
}
