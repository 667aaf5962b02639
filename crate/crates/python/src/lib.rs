//! Python bindings for `simplexforge`.
//!
//! Matrices cross the boundary as nested lists of `complex`, Bloch vectors as
//! lists of `float`. Reports come back as plain dicts.

use std::cell::RefCell;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use simplexforge::certify::verify_matrices;
use simplexforge::knaster::{continuity_coefficients, ScanSchedule};
use simplexforge::persist::to_json_string;
use simplexforge::tracepoly::{pure_cubic_value, pure_radius};
use simplexforge::{
    BlochVector, CMatrix, Error, GellMannBasis, HermitianMatrix, OptContext, OptimizerConfig,
    PovmFamilyResult, RVector, RotationState, TracePowerProfile, C64,
};

type PyMatrix = Vec<Vec<C64>>;

fn err(e: Error) -> PyErr {
    match e {
        Error::NotConverged { .. } | Error::NumericalIntegrity(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py(m: &CMatrix) -> PyMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn from_py(rows: &PyMatrix) -> PyResult<HermitianMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a non-empty square matrix"));
    }
    HermitianMatrix::new(CMatrix::from_fn(n, n, |i, j| rows[i][j])).map_err(err)
}

fn from_py_all(mats: &[PyMatrix]) -> PyResult<Vec<HermitianMatrix>> {
    mats.iter().map(from_py).collect()
}

/// Round-trips a serializable value through `json.loads`.
fn to_dict<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = to_json_string(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "GellMannBasis", module = "simplexforge_py", frozen)]
struct PyBasis {
    inner: GellMannBasis,
}

#[pymethods]
impl PyBasis {
    #[new]
    fn new(dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: simplexforge::build_basis(dim).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn matrices(&self) -> Vec<PyMatrix> {
        self.inner.matrices().iter().map(|m| to_py(m.matrix())).collect()
    }

    fn to_bloch(&self, matrix: PyMatrix) -> PyResult<Vec<f64>> {
        let h = from_py(&matrix)?;
        let v = simplexforge::to_bloch(&h, &self.inner).map_err(err)?;
        Ok(v.coords.iter().copied().collect())
    }

    #[allow(clippy::wrong_self_convention)]
    fn from_bloch(&self, coords: Vec<f64>) -> PyResult<PyMatrix> {
        let v = BlochVector::new(self.inner.dim(), RVector::from_vec(coords)).map_err(err)?;
        let h = simplexforge::from_bloch(&v, &self.inner).map_err(err)?;
        Ok(to_py(h.matrix()))
    }

    fn __repr__(&self) -> String {
        format!("GellMannBasis(dim={}, len={})", self.inner.dim(), self.inner.len())
    }
}

/// Outcome of one optimization.
#[pyclass(name = "FamilyResult", module = "simplexforge_py", frozen)]
struct PyFamily {
    inner: PovmFamilyResult,
}

#[pymethods]
impl PyFamily {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim
    }
    #[getter]
    fn f0(&self) -> f64 {
        self.inner.f0
    }
    #[getter]
    fn power(&self) -> usize {
        self.inner.power
    }
    #[getter]
    fn residual_sum(&self) -> f64 {
        self.inner.residual_sum
    }
    #[getter]
    fn per_vertex_residuals(&self) -> Vec<f64> {
        self.inner.per_vertex_residuals.clone()
    }
    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }
    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }
    #[getter]
    fn restarts(&self) -> usize {
        self.inner.restarts
    }
    #[getter]
    fn spectra(&self) -> Vec<Vec<f64>> {
        self.inner.spectra.clone()
    }
    #[getter]
    fn psd_flags(&self) -> Vec<bool> {
        self.inner.psd_flags.clone()
    }
    #[getter]
    fn spectra_spread(&self) -> f64 {
        self.inner.spectra_spread()
    }
    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner
            .vertices
            .iter()
            .map(|v| v.coords.iter().copied().collect())
            .collect()
    }
    #[getter]
    fn matrices(&self) -> Vec<PyMatrix> {
        self.inner.matrices.iter().map(|m| to_py(m.matrix())).collect()
    }
    /// Residual sum after each accepted step.
    #[getter]
    fn history(&self) -> Vec<f64> {
        self.inner.history.clone()
    }
    /// Rotation matrix, row by row.
    #[getter]
    fn rotation(&self) -> Vec<Vec<f64>> {
        let r = self.inner.rotation.matrix();
        (0..r.nrows())
            .map(|i| r.row(i).iter().copied().collect())
            .collect()
    }

    #[pyo3(signature = (tol = 1e-8))]
    fn verify<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let rep = simplexforge::verify_family(&self.inner, tol).map_err(err)?;
        to_dict(py, &rep)
    }

    fn __repr__(&self) -> String {
        format!(
            "FamilyResult(dim={}, power={}, f0={}, residual_sum={:.3e}, converged={})",
            self.inner.dim, self.inner.power, self.inner.f0, self.inner.residual_sum,
            self.inner.converged
        )
    }
}

/// Basis, structure tensor and reference simplex for one dimension.
#[pyclass(name = "Optimizer", module = "simplexforge_py", frozen)]
struct PyOptimizer {
    ctx: OptContext,
}

impl PyOptimizer {
    fn start(&self, seed: u64, warm: Option<PyRef<'_, PyFamily>>) -> PyResult<RotationState> {
        match warm {
            Some(w) if w.inner.dim != self.ctx.n => Err(PyValueError::new_err(format!(
                "warm start has dimension {}, optimizer has {}",
                w.inner.dim, self.ctx.n
            ))),
            Some(w) => Ok(w.inner.rotation.clone()),
            None => self.ctx.default_start(seed).map_err(err),
        }
    }
}

fn config(
    power: usize,
    target: f64,
    tol: f64,
    max_iters: usize,
    seed: u64,
    damping: f64,
) -> PyResult<OptimizerConfig> {
    let cfg = OptimizerConfig {
        power,
        target,
        tol_residual: tol,
        max_iters,
        lm_damping: damping,
        seed,
        ..OptimizerConfig::default()
    };
    cfg.validate().map_err(err)?;
    Ok(cfg)
}

#[pymethods]
impl PyOptimizer {
    #[new]
    fn new(dim: usize) -> PyResult<Self> {
        Ok(Self {
            ctx: OptContext::new(dim).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.ctx.n
    }

    /// The seed SIC as a converged family.
    fn seed_family(&self) -> PyResult<PyFamily> {
        let sic = simplexforge::seed_sic(self.ctx.n).map_err(err)?;
        Ok(PyFamily {
            inner: PovmFamilyResult::from_sic(&self.ctx, &sic).map_err(err)?,
        })
    }

    #[pyo3(signature = (f0, power = 3, tol = 1e-18, max_iters = 500, seed = 0, damping = 1e-3, start = None))]
    #[allow(clippy::too_many_arguments)]
    fn optimize(
        &self,
        py: Python<'_>,
        f0: f64,
        power: usize,
        tol: f64,
        max_iters: usize,
        seed: u64,
        damping: f64,
        start: Option<PyRef<'_, PyFamily>>,
    ) -> PyResult<PyFamily> {
        let cfg = config(power, f0, tol, max_iters, seed, damping)?;
        let start = self.start(seed, start)?;
        let ctx = &self.ctx;
        let inner = py
            .detach(|| simplexforge::optimize(&start, ctx, &cfg))
            .map_err(err)?;
        Ok(PyFamily { inner })
    }

    /// Continuation over evenly spaced targets, returned in target order.
    #[pyo3(signature = (f0_min, f0_max, steps, power = 3, tol = 1e-18, max_iters = 500, seed = 0, damping = 1e-3, parallel = false, start = None))]
    #[allow(clippy::too_many_arguments)]
    fn scan(
        &self,
        py: Python<'_>,
        f0_min: f64,
        f0_max: f64,
        steps: usize,
        power: usize,
        tol: f64,
        max_iters: usize,
        seed: u64,
        damping: f64,
        parallel: bool,
        start: Option<PyRef<'_, PyFamily>>,
    ) -> PyResult<Vec<PyFamily>> {
        let cfg = config(power, f0_min, tol, max_iters, seed, damping)?;
        let start = self.start(seed, start)?;
        let schedule = if parallel {
            ScanSchedule::Parallel
        } else {
            ScanSchedule::Sequential
        };
        let ctx = &self.ctx;
        let entries = py
            .detach(|| {
                simplexforge::scan_f0(f0_min, f0_max, steps, &cfg, &start, ctx, schedule, |_| {})
            })
            .map_err(err)?;
        Ok(entries
            .into_iter()
            .map(|e| PyFamily { inner: e.result })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Optimizer(dim={})", self.ctx.n)
    }
}

/// Vertices of the regular `n`-simplex in `R^n`.
#[pyfunction]
fn regular_simplex(n: usize) -> PyResult<Vec<Vec<f64>>> {
    let s = simplexforge::regular_simplex(n).map_err(err)?;
    Ok(s.vertices().iter().map(|v| v.iter().copied().collect()).collect())
}

/// Projectors of the built-in SIC for `dim` 2 or 3.
#[pyfunction]
fn seed_sic(dim: usize) -> PyResult<Vec<PyMatrix>> {
    let sic = simplexforge::seed_sic(dim).map_err(err)?;
    Ok(sic.projectors.iter().map(|p| to_py(p.matrix())).collect())
}

#[pyfunction]
fn pure_state_radius(dim: usize) -> f64 {
    pure_radius(dim)
}

#[pyfunction]
fn pure_state_cubic(dim: usize) -> f64 {
    pure_cubic_value(dim)
}

#[pyfunction]
fn trace_power(matrix: PyMatrix, m: usize) -> PyResult<f64> {
    let h = from_py(&matrix)?;
    simplexforge::trace_power(h.matrix(), m).map_err(err)
}

/// Eigenvalues of a Hermitian matrix recovered from `Tr ρ^k`, descending.
#[pyfunction]
fn spectrum_from_traces(matrix: PyMatrix) -> PyResult<Vec<f64>> {
    let h = from_py(&matrix)?;
    let profile = TracePowerProfile::of(&h).map_err(err)?;
    simplexforge::spectrum_from_traces(&profile).map_err(err)
}

/// Certification report for a set of element matrices.
#[pyfunction]
#[pyo3(signature = (matrices, power = 3, f0 = None, tol = 1e-8))]
fn verify<'py>(
    py: Python<'py>,
    matrices: Vec<PyMatrix>,
    power: usize,
    f0: Option<f64>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let mats = from_py_all(&matrices)?;
    let rep = verify_matrices(&mats, power, f0, tol).map_err(err)?;
    to_dict(py, &rep)
}

/// `n I - Σ ρ_k` over the first `n² - 1` elements.
#[pyfunction]
fn last_vertex(matrices: Vec<PyMatrix>) -> PyResult<PyMatrix> {
    let mats = from_py_all(&matrices)?;
    let h = simplexforge::last_vertex(&mats).map_err(err)?;
    Ok(to_py(h.matrix()))
}

/// Cubic trace on the circle through three equiangular elements.
#[pyfunction]
#[pyo3(signature = (a, b, c, samples = 360))]
fn circle<'py>(
    py: Python<'py>,
    a: PyMatrix,
    b: PyMatrix,
    c: PyMatrix,
    samples: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let (a, b, c) = (from_py(&a)?, from_py(&b)?, from_py(&c)?);
    let profile = simplexforge::circle_profile(&a, &b, &c, samples).map_err(err)?;
    let (ca, cb) = continuity_coefficients(profile.dim, profile.alpha);
    let d = to_dict(py, &profile)?.cast_into::<PyDict>()?;
    d.set_item("closed_form_constant", ca)?;
    d.set_item("closed_form_cos3_coefficient", cb)?;
    Ok(d.into_any())
}

/// Equal-value equiangular points on the unit circle for `f(x, y)`.
#[pyfunction]
#[pyo3(signature = (f, points, tol = 1e-12))]
fn knaster_s1<'py>(
    py: Python<'py>,
    f: Bound<'py, PyAny>,
    points: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let failure: RefCell<Option<PyErr>> = RefCell::new(None);
    let call = |x: f64, y: f64| -> f64 {
        if failure.borrow().is_some() {
            return f64::NAN;
        }
        match f.call1((x, y)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                f64::NAN
            }
        }
    };
    let sol = simplexforge::knaster_s1(call, points, tol);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    to_dict(py, &sol.map_err(err)?)
}

#[pymodule]
fn simplexforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBasis>()?;
    m.add_class::<PyOptimizer>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(regular_simplex, m)?)?;
    m.add_function(wrap_pyfunction!(seed_sic, m)?)?;
    m.add_function(wrap_pyfunction!(pure_state_radius, m)?)?;
    m.add_function(wrap_pyfunction!(pure_state_cubic, m)?)?;
    m.add_function(wrap_pyfunction!(trace_power, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_from_traces, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(last_vertex, m)?)?;
    m.add_function(wrap_pyfunction!(circle, m)?)?;
    m.add_function(wrap_pyfunction!(knaster_s1, m)?)?;
    Ok(())
}
