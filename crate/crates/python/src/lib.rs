//! Python bindings for `quatcalc`.
//!
//! Matrices cross the boundary as nested lists whose entries are numbers,
//! `[w, x, y, z]` lists or `Quaternion` objects. Reports come back as plain
//! dicts and lists.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use quatcalc::discretize::{factorization_example as build_example, Which};
use quatcalc::qmatrix::{cartesian as cartesian_decomp, polar as polar_decomp};
use quatcalc::scalculus::{riesz_decompose, RieszOptions, RieszTolerances};
use quatcalc::spectrum::spherical_spectrum;
use quatcalc::verify::{self, VerifyConfig};
use quatcalc::{io, irreducibility, ImaginaryUnit, Sphere};

create_exception!(quatcalc_py, QuatcalcError, PyException);

const SPECTRUM_TOL: f64 = 1e-8;

fn err(e: quatcalc::Error) -> PyErr {
    QuatcalcError::new_err(e.to_string())
}

#[pyclass(name = "Quaternion", module = "quatcalc_py", from_py_object)]
#[derive(Clone, Copy)]
pub struct PyQuaternion(quatcalc::Quaternion);

#[pymethods]
impl PyQuaternion {
    #[new]
    #[pyo3(signature = (w=0.0, x=0.0, y=0.0, z=0.0))]
    fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        PyQuaternion(quatcalc::Quaternion::new(w, x, y, z))
    }

    #[getter]
    fn w(&self) -> f64 {
        self.0.w
    }
    #[getter]
    fn x(&self) -> f64 {
        self.0.x
    }
    #[getter]
    fn y(&self) -> f64 {
        self.0.y
    }
    #[getter]
    fn z(&self) -> f64 {
        self.0.z
    }

    fn conj(&self) -> Self {
        PyQuaternion(self.0.conj())
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn inv(&self) -> PyResult<Self> {
        self.0.try_inv().map(PyQuaternion).map_err(err)
    }

    /// `(re, |im|)`: the sphere this quaternion lies on.
    fn sphere(&self) -> (f64, f64) {
        (self.0.re(), self.0.im_norm())
    }

    fn tolist(&self) -> [f64; 4] {
        self.0.to_array()
    }

    fn __add__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyQuaternion(self.0 + entry(other)?))
    }

    fn __radd__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyQuaternion(entry(other)? + self.0))
    }

    fn __sub__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyQuaternion(self.0 - entry(other)?))
    }

    fn __rsub__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyQuaternion(entry(other)? - self.0))
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyQuaternion(self.0 * entry(other)?))
    }

    fn __rmul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyQuaternion(entry(other)? * self.0))
    }

    fn __neg__(&self) -> Self {
        PyQuaternion(-self.0)
    }

    fn __abs__(&self) -> f64 {
        self.0.norm()
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        entry(other).is_ok_and(|q| q == self.0)
    }

    fn __repr__(&self) -> String {
        let q = self.0;
        format!("Quaternion({}, {}, {}, {})", q.w, q.x, q.y, q.z)
    }
}

/// Reads a number, a `[w, x, y, z]` sequence or a `Quaternion`.
fn entry(v: &Bound<'_, PyAny>) -> PyResult<quatcalc::Quaternion> {
    if let Ok(q) = v.extract::<PyQuaternion>() {
        return Ok(q.0);
    }
    if let Ok(r) = v.extract::<f64>() {
        return Ok(quatcalc::Quaternion::real(r));
    }
    match v.extract::<Vec<f64>>() {
        Ok(c) if c.len() == 4 => Ok(quatcalc::Quaternion::new(c[0], c[1], c[2], c[3])),
        _ => Err(QuatcalcError::new_err("expected a number, a [w, x, y, z] list or a Quaternion")),
    }
}

#[pyclass(name = "QMatrix", module = "quatcalc_py", from_py_object)]
#[derive(Clone)]
pub struct PyQMatrix(quatcalc::QMatrix);

#[pymethods]
impl PyQMatrix {
    /// Builds a matrix from a list of rows.
    #[new]
    fn new(rows: &Bound<'_, PyAny>) -> PyResult<Self> {
        let mut parsed = Vec::new();
        for row in rows.try_iter()? {
            let row = row?;
            let mut r = Vec::new();
            for e in row.try_iter()? {
                r.push(entry(&e?)?);
            }
            parsed.push(r);
        }
        quatcalc::QMatrix::from_rows(&parsed).map(PyQMatrix).map_err(err)
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyQMatrix(quatcalc::QMatrix::identity(n))
    }

    #[staticmethod]
    fn zeros(rows: usize, cols: usize) -> Self {
        PyQMatrix(quatcalc::QMatrix::zeros(rows, cols))
    }

    #[staticmethod]
    fn diag(entries: &Bound<'_, PyAny>) -> PyResult<Self> {
        let d = entries.try_iter()?.map(|e| entry(&e?)).collect::<PyResult<Vec<_>>>()?;
        Ok(PyQMatrix(quatcalc::QMatrix::from_diag(&d)))
    }

    /// Parses the JSON matrix format used by the command line tool.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::matrix_from_str(text).map(PyQMatrix).map_err(err)
    }

    fn to_json(&self) -> String {
        io::matrix_to_json(&self.0).to_string()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.rows(), self.0.cols())
    }

    fn __getitem__(&self, idx: (usize, usize)) -> PyResult<PyQuaternion> {
        let (r, c) = idx;
        if r >= self.0.rows() || c >= self.0.cols() {
            return Err(pyo3::exceptions::PyIndexError::new_err(format!("index ({r}, {c}) out of range")));
        }
        Ok(PyQuaternion(self.0[(r, c)]))
    }

    /// Rows of `[w, x, y, z]` lists.
    fn tolist(&self) -> Vec<Vec<[f64; 4]>> {
        (0..self.0.rows()).map(|r| self.0.row(r).iter().map(|q| q.to_array()).collect()).collect()
    }

    /// The `2n × 2n` complex adjoint matrix as rows of Python complex numbers.
    fn chi(&self) -> Vec<Vec<num_complex_py::Complex>> {
        let m = self.0.chi();
        (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| num_complex_py::Complex(m[(r, c)])).collect()).collect()
    }

    fn adjoint(&self) -> Self {
        PyQMatrix(self.0.adjoint())
    }

    fn op_norm(&self) -> f64 {
        self.0.op_norm()
    }

    fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn __matmul__(&self, other: &PyQMatrix) -> PyResult<Self> {
        if self.0.cols() != other.0.rows() {
            return Err(QuatcalcError::new_err("inner dimensions differ"));
        }
        Ok(PyQMatrix(self.0.matmul(&other.0)))
    }

    fn __add__(&self, other: &PyQMatrix) -> PyResult<Self> {
        same_shape(&self.0, &other.0)?;
        Ok(PyQMatrix(&self.0 + &other.0))
    }

    fn __sub__(&self, other: &PyQMatrix) -> PyResult<Self> {
        same_shape(&self.0, &other.0)?;
        Ok(PyQMatrix(&self.0 - &other.0))
    }

    fn __neg__(&self) -> Self {
        PyQMatrix(-&self.0)
    }

    fn __repr__(&self) -> String {
        format!("QMatrix({}x{})", self.0.rows(), self.0.cols())
    }
}

fn same_shape(a: &quatcalc::QMatrix, b: &quatcalc::QMatrix) -> PyResult<()> {
    if a.rows() == b.rows() && a.cols() == b.cols() {
        Ok(())
    } else {
        Err(QuatcalcError::new_err("shapes differ"))
    }
}

mod num_complex_py {
    use pyo3::prelude::*;
    use pyo3::types::PyComplex;

    pub struct Complex(pub num_complex::Complex64);

    impl<'py> IntoPyObject<'py> for Complex {
        type Target = PyComplex;
        type Output = Bound<'py, PyComplex>;
        type Error = std::convert::Infallible;

        fn into_pyobject(self, py: Python<'py>) -> Result<Self::Output, Self::Error> {
            Ok(PyComplex::from_doubles(py, self.0.re, self.0.im))
        }
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let out = PyList::empty(py);
            for item in items {
                out.append(json_to_py(py, item)?)?;
            }
            out.into_any()
        }
        Value::Object(map) => {
            let out = PyDict::new(py);
            for (k, item) in map {
                out.set_item(k, json_to_py(py, item)?)?;
            }
            out.into_any()
        }
    })
}

fn spheres_arg(spheres: Vec<(f64, f64)>) -> Vec<Sphere> {
    spheres.into_iter().map(|(re, rad)| Sphere::new(re, rad)).collect()
}

/// S-spectrum as a list of `{"re", "rad", "mult"}` dicts.
#[pyfunction]
fn spectrum<'py>(py: Python<'py>, t: &PyQMatrix) -> PyResult<Bound<'py, PyAny>> {
    let s = spherical_spectrum(&t.0, SPECTRUM_TOL).map_err(err)?;
    json_to_py(py, &io::spectrum_to_json(&s))
}

/// Splits `t` along `sigma ∪ tau`, each a list of `(re, rad)` spheres.
#[pyfunction]
#[pyo3(signature = (t, sigma, tau, nodes=None, slice=None))]
fn riesz<'py>(
    py: Python<'py>,
    t: &PyQMatrix,
    sigma: Vec<(f64, f64)>,
    tau: Vec<(f64, f64)>,
    nodes: Option<usize>,
    slice: Option<(f64, f64, f64)>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut opts = RieszOptions::default();
    if let Some(n) = nodes {
        opts.nodes = n;
    }
    if let Some((x, y, z)) = slice {
        opts.m = ImaginaryUnit::new(x, y, z).map_err(err)?;
    }
    let pair = riesz_decompose(&t.0, &spheres_arg(sigma), &spheres_arg(tau), &opts).map_err(err)?;
    let out = PyDict::new(py);
    for (name, part) in [("sigma", &pair.sigma), ("tau", &pair.tau)] {
        let d = PyDict::new(py);
        d.set_item("projection", PyQMatrix(part.projection.clone()))?;
        d.set_item("basis", PyQMatrix(part.basis.clone()))?;
        d.set_item("restricted", PyQMatrix(part.restricted.clone()))?;
        d.set_item("spectrum", json_to_py(py, &io::spectrum_to_json(&part.spectrum))?)?;
        out.set_item(name, d)?;
    }
    let residuals = PyDict::new(py);
    for (name, value) in pair.certificate.entries() {
        residuals.set_item(name, value)?;
    }
    out.set_item("residuals", residuals)?;
    out.set_item("passed", pair.certificate.passes(&RieszTolerances::default()))?;
    Ok(out)
}

/// `(W0, |T|, rank)` with `T = W0 |T|`.
#[pyfunction]
fn polar(t: &PyQMatrix) -> (PyQMatrix, PyQMatrix, usize) {
    let p = polar_decomp(&t.0);
    (PyQMatrix(p.w0), PyQMatrix(p.abs), p.rank)
}

/// `(A, B, J)` with `T = A + ½ J B`; `t` must be normal.
#[pyfunction]
fn cartesian(t: &PyQMatrix) -> PyResult<(PyQMatrix, PyQMatrix, PyQMatrix)> {
    let c = cartesian_decomp(&t.0).map_err(err)?;
    Ok((PyQMatrix(c.a), PyQMatrix(c.b), PyQMatrix(c.j.matrix().clone())))
}

/// The `T = (W + K) S` factorization on an `n`-point grid.
#[pyfunction]
#[pyo3(signature = (which="normal", n=96))]
fn factorization_example<'py>(py: Python<'py>, which: &str, n: usize) -> PyResult<Bound<'py, PyDict>> {
    let which: Which = which.parse().map_err(err)?;
    let ex = build_example(which, n).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("which", which.to_string())?;
    out.set_item("n", ex.n)?;
    out.set_item("t", PyQMatrix(ex.t))?;
    out.set_item("w", PyQMatrix(ex.w))?;
    out.set_item("k", PyQMatrix(ex.k))?;
    out.set_item("s", PyQMatrix(ex.s))?;
    let diag = serde_json::to_value(&ex.diagnostics).map_err(|e| QuatcalcError::new_err(e.to_string()))?;
    out.set_item("diagnostics", json_to_py(py, &diag)?)?;
    Ok(out)
}

/// Structural irreducibility decisions; `None` means indeterminate.
#[pyfunction]
#[pyo3(signature = (t, oracle=false, seed=0))]
fn irreducibility_report<'py>(py: Python<'py>, t: &PyQMatrix, oracle: bool, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let r = irreducibility::irreducibility_report(&t.0, oracle, seed).map_err(err)?;
    json_to_py(py, &r.to_json())
}

/// Runs the verification suite and returns its JSON report as a dict.
#[pyfunction]
#[pyo3(signature = (seed=2024, only=None, trials=None, max_n=None, tolerances=None))]
fn verify_suite<'py>(
    py: Python<'py>,
    seed: u64,
    only: Option<Vec<String>>,
    trials: Option<usize>,
    max_n: Option<usize>,
    tolerances: Option<Vec<(String, f64)>>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = VerifyConfig { seed, max_n, ..VerifyConfig::default() };
    if let Some(t) = trials {
        cfg.trials = t;
    }
    for (name, value) in tolerances.unwrap_or_default() {
        cfg.tol.set(&name, value).map_err(err)?;
    }
    let results = py.detach(|| match &only {
        Some(ids) => ids.iter().map(|id| verify::run_one(id, &cfg)).collect::<quatcalc::Result<Vec<_>>>(),
        None => Ok(verify::run_all(&cfg)),
    });
    let results = results.map_err(err)?;
    json_to_py(py, &verify::report_json(&cfg, &results))
}

#[pymodule]
pub fn quatcalc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("QuatcalcError", m.py().get_type::<QuatcalcError>())?;
    m.add_class::<PyQuaternion>()?;
    m.add_class::<PyQMatrix>()?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(riesz, m)?)?;
    m.add_function(wrap_pyfunction!(polar, m)?)?;
    m.add_function(wrap_pyfunction!(cartesian, m)?)?;
    m.add_function(wrap_pyfunction!(factorization_example, m)?)?;
    m.add_function(wrap_pyfunction!(irreducibility_report, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    Ok(())
}
