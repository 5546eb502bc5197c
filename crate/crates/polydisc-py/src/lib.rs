//! Python bindings. Points are passed as lists of complex numbers
//! (y_1, ..., y_{n-1}, q); reports come back as plain dicts.

// the pyfunction macro expands `?` into PyErr -> PyErr conversions
#![allow(clippy::useless_conversion)]

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use polydisc::distances::{self, DEFAULT_GRID};
use polydisc::interpolation::{self, DiscFunction};
use polydisc::membership::{self, Select};
use polydisc::mobius::{self, CPoint};
use polydisc::schwarz::{check_all, SchwarzProblem};
use polydisc::{geometry, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Input { .. } | Error::Domain(_) | Error::Precondition(_) | Error::NonHermitian(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn point(coords: Vec<Complex64>) -> PyResult<CPoint> {
    CPoint::new(coords).map_err(py_err)
}

/// serde value -> Python object through the json module.
fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(PyModule::import_bound(py, "json")?.call_method1("loads", (text,))?.unbind())
}

#[pyfunction]
fn symmetrize(z: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    Ok(membership::symmetrize(&z).map_err(py_err)?.coords)
}

#[pyfunction]
fn in_tilde_g(y: Vec<Complex64>) -> PyResult<bool> {
    Ok(membership::in_tilde_g(&point(y)?, Select::All).map_err(py_err)?.verdict)
}

#[pyfunction]
fn in_tilde_gamma(y: Vec<Complex64>) -> PyResult<bool> {
    Ok(membership::in_tilde_gamma(&point(y)?, Select::All).map_err(py_err)?.verdict)
}

#[pyfunction]
fn in_g(s: Vec<Complex64>) -> PyResult<bool> {
    Ok(membership::in_g(&point(s)?).map_err(py_err)?.verdict)
}

#[pyfunction]
fn in_gamma(s: Vec<Complex64>) -> PyResult<bool> {
    Ok(membership::in_gamma(&point(s)?).map_err(py_err)?.verdict)
}

#[pyfunction]
fn in_b_gamma(s: Vec<Complex64>) -> PyResult<bool> {
    membership::in_b_gamma(&point(s)?).map_err(py_err)
}

/// Full report for set in {"tilde_g", "tilde_gamma", "g", "gamma"}.
#[pyfunction]
fn membership_report(py: Python<'_>, set: &str, y: Vec<Complex64>) -> PyResult<PyObject> {
    let y = point(y)?;
    let rep = match set {
        "tilde_g" => membership::in_tilde_g(&y, Select::All),
        "tilde_gamma" => membership::in_tilde_gamma(&y, Select::All),
        "g" => membership::in_g(&y),
        "gamma" => membership::in_gamma(&y),
        _ => return Err(PyValueError::new_err(format!("unknown set `{set}`"))),
    }
    .map_err(py_err)?;
    to_py(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (s, grid = 4096))]
fn costara_sup(s: Vec<Complex64>, grid: usize) -> PyResult<f64> {
    membership::costara_sup(&point(s)?, grid).map_err(py_err)
}

#[pyfunction]
fn phi(j: usize, y: Vec<Complex64>, z: Complex64) -> PyResult<Complex64> {
    mobius::phi(j, &point(y)?, z).map_err(py_err)
}

#[pyfunction]
fn d_norm(j: usize, y: Vec<Complex64>) -> PyResult<f64> {
    mobius::d_norm(j, &point(y)?).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (j, y, grid = 4096))]
fn sup_on_torus(j: usize, y: Vec<Complex64>, grid: usize) -> PyResult<f64> {
    mobius::sup_on_torus(j, &point(y)?, grid).map_err(py_err)
}

/// Schwarz conditions for maps 0 -> 0, lambda0 -> y.
#[pyfunction]
fn schwarz(py: Python<'_>, lambda0: Complex64, y: Vec<Complex64>) -> PyResult<PyObject> {
    let p = SchwarzProblem::new(lambda0, point(y)?).map_err(py_err)?;
    let conds = check_all(&p).map_err(py_err)?;
    let verdict = conds.iter().all(|m| m.holds);
    to_py(py, &serde_json::json!({ "verdict": verdict, "conditions": conds }))
}

/// An analytic disc through (0, 0) and (lambda0, y).
#[pyclass(name = "Disc", module = "polydisc_py")]
struct PyDisc {
    inner: DiscFunction,
}

#[pymethods]
impl PyDisc {
    fn __call__(&self, lam: Complex64) -> PyResult<Vec<Complex64>> {
        Ok(self.inner.eval(lam).map_err(py_err)?.coords)
    }

    /// The 2x2 matrix function at lam, row-major.
    fn matrix(&self, lam: Complex64) -> PyResult<[[Complex64; 2]; 2]> {
        let m = self.inner.matrix_at(lam).map_err(py_err)?;
        Ok([[m.a11, m.a12], [m.a21, m.a22]])
    }

    #[getter]
    fn lambda0(&self) -> Complex64 {
        self.inner.lambda0
    }

    /// (origin error, target error, sampled points outside the closed set).
    #[pyo3(signature = (samples = 1000, seed = 0))]
    fn verify(&self, samples: usize, seed: u64) -> PyResult<(f64, f64, usize)> {
        let v = self.inner.verify(samples, seed).map_err(py_err)?;
        Ok((v.origin_error, v.target_error, v.outside))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyDisc { inner })
    }

    fn __repr__(&self) -> String {
        format!("Disc(kind={:?}, n={}, lambda0={})", self.inner.kind, self.inner.n, self.inner.lambda0)
    }
}

/// Strict n = 3 interpolation: psi(0) = 0, psi(lambda0) = y.
#[pyfunction]
fn interpolate(y: Vec<Complex64>, lambda0: Complex64) -> PyResult<PyDisc> {
    Ok(PyDisc { inner: interpolation::interpolate(&point(y)?, lambda0).map_err(py_err)? })
}

/// A disc through (0, 0) and (lambda0, y) for y in J_n, marginal data allowed.
#[pyfunction]
fn jn_disc(y: Vec<Complex64>, lambda0: Complex64) -> PyResult<PyDisc> {
    Ok(PyDisc { inner: interpolation::jn_interpolant(&point(y)?, lambda0, true).map_err(py_err)? })
}

/// Member of the explicit family at (3/2, 3/4, 1/2), lambda0 = -4/5, with parameter t.
#[pyfunction]
fn family_disc(t: Complex64) -> PyResult<PyDisc> {
    let g = interpolation::family_g(t).map_err(py_err)?;
    Ok(PyDisc { inner: interpolation::family_disc(g).map_err(py_err)? })
}

#[pyfunction]
fn dist_formula(y: Vec<Complex64>) -> PyResult<f64> {
    distances::dist_formula(&point(y)?).map_err(py_err)
}

/// closed_form, carath_lower, lempert_upper (None when no disc), witness and disc.
#[pyfunction]
#[pyo3(signature = (y, grid = DEFAULT_GRID))]
fn distance(py: Python<'_>, y: Vec<Complex64>, grid: usize) -> PyResult<PyObject> {
    to_py(py, &distances::distance(&point(y)?, grid).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (y, samples = 1000))]
fn separating_polynomial(py: Python<'_>, y: Vec<Complex64>, samples: usize) -> PyResult<PyObject> {
    to_py(py, &geometry::separating_polynomial(&point(y)?, samples).map_err(py_err)?)
}

#[pyfunction]
fn nonconvex_witness(n: usize) -> PyResult<(Vec<Complex64>, Vec<Complex64>, Vec<Complex64>)> {
    let (a, b, m) = geometry::nonconvex_witness(n).map_err(py_err)?;
    Ok((a.coords, b.coords, m.coords))
}

#[pyfunction]
fn noncircular_witness(n: usize) -> PyResult<(Vec<Complex64>, Vec<Complex64>)> {
    let (y, iy) = geometry::noncircular_witness(n).map_err(py_err)?;
    Ok((y.coords, iy.coords))
}

#[pymodule]
fn polydisc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDisc>()?;
    m.add_function(wrap_pyfunction!(symmetrize, m)?)?;
    m.add_function(wrap_pyfunction!(in_tilde_g, m)?)?;
    m.add_function(wrap_pyfunction!(in_tilde_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(in_g, m)?)?;
    m.add_function(wrap_pyfunction!(in_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(in_b_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(membership_report, m)?)?;
    m.add_function(wrap_pyfunction!(costara_sup, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(d_norm, m)?)?;
    m.add_function(wrap_pyfunction!(sup_on_torus, m)?)?;
    m.add_function(wrap_pyfunction!(schwarz, m)?)?;
    m.add_function(wrap_pyfunction!(interpolate, m)?)?;
    m.add_function(wrap_pyfunction!(jn_disc, m)?)?;
    m.add_function(wrap_pyfunction!(family_disc, m)?)?;
    m.add_function(wrap_pyfunction!(dist_formula, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(separating_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(nonconvex_witness, m)?)?;
    m.add_function(wrap_pyfunction!(noncircular_witness, m)?)?;
    Ok(())
}
