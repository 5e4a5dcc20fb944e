//! Python bindings. Reports cross the boundary as JSON-shaped dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use sphere_taming::ball::{extend_to_ball, verify_decomposition};
use sphere_taming::canonical::{canonical_relabel, isomorphic};
use sphere_taming::enumerate::enumerate_foliations;
use sphere_taming::format::{emit, parse};
use sphere_taming::invariants::{d_invariants, enumerate_polygons, Region};
use sphere_taming::moves::{self, Side};
use sphere_taming::taming::{is_taming, simplicity_check, ValueAssignment};
use sphere_taming::tightness::{decide_tightness, find_allowable, oracle_tightness, synthesize_taming, Verdict};
use sphere_taming::{validate, Error, FoliationGraph};

fn err(e: Error) -> PyErr {
    match e {
        Error::Internal(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn values(d: &Bound<'_, PyDict>) -> PyResult<ValueAssignment> {
    let mut a = ValueAssignment::new();
    for (k, v) in d.iter() {
        let k: String = k.extract()?;
        let v: String = v.str()?.extract()?;
        let r = sphere_taming::taming::parse_rational(&v).map_err(PyValueError::new_err)?;
        a.set(k, r);
    }
    Ok(a)
}

/// A characteristic foliation given by its separatrix graph.
#[pyclass(name = "Foliation", module = "sphere_taming", frozen)]
struct PyFoliation {
    g: FoliationGraph,
}

#[pymethods]
impl PyFoliation {
    /// Parses the text format; value lines are ignored.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let (g, _) = parse(text).map_err(err)?;
        Ok(PyFoliation { g })
    }

    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        sphere_taming::fixtures::canonical_fixtures()
            .remove(name)
            .map(|g| PyFoliation { g })
            .ok_or_else(|| PyValueError::new_err(format!("no fixture {name:?}")))
    }

    fn text(&self) -> String {
        emit(&self.g, None)
    }

    fn __repr__(&self) -> String {
        format!("Foliation({} points, {} separatrices)", self.g.point_count(), self.g.edge_count())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.g == other.g
    }

    fn point_ids(&self) -> Vec<String> {
        self.g.point_ids().into_iter().collect()
    }

    fn validate(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &validate(&self.g))
    }

    fn is_valid(&self) -> bool {
        validate(&self.g).is_valid()
    }

    /// `(d_plus, d_minus)` of the whole sphere.
    fn d(&self) -> PyResult<(i64, i64)> {
        d_invariants(&self.g, &Region::whole(&self.g)).map_err(err)
    }

    fn polygons(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let p = enumerate_polygons(&self.g, self.g.edge_count()).map_err(err)?;
        to_py(py, &p)
    }

    fn reverse(&self) -> Self {
        PyFoliation { g: self.g.reverse() }
    }

    fn canonical(&self) -> PyResult<Self> {
        canonical_relabel(&self.g)
            .map(|g| PyFoliation { g })
            .ok_or_else(|| PyValueError::new_err("invalid foliation"))
    }

    fn isomorphic(&self, other: &Self) -> bool {
        isomorphic(&self.g, &other.g)
    }

    /// Verdict and certificate as a dict.
    fn decide(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &decide_tightness(&self.g).map_err(err)?)
    }

    fn oracle(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &oracle_tightness(&self.g).map_err(err)?)
    }

    fn is_tight(&self) -> PyResult<bool> {
        Ok(decide_tightness(&self.g).map_err(err)?.verdict == Verdict::Tight)
    }

    fn find_allowable(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &find_allowable(&self.g).map_err(err)?)
    }

    /// A taming function as `{point: "n/d"}`, or `None`.
    fn tame(&self) -> PyResult<Option<Vec<(String, String)>>> {
        Ok(synthesize_taming(&self.g).map_err(err)?.map(|(a, _)| {
            a.iter()
                .map(|(k, v)| (k.clone(), sphere_taming::taming::format_rational(v)))
                .collect()
        }))
    }

    /// Values are given as `{point: "n/d"}` or integers.
    fn is_taming(&self, phi: &Bound<'_, PyDict>) -> PyResult<bool> {
        Ok(is_taming(&self.g, &values(phi)?).map_err(err)?.taming)
    }

    fn simplicity(&self, py: Python<'_>, phi: &Bound<'_, PyDict>) -> PyResult<Py<PyAny>> {
        to_py(py, &simplicity_check(&self.g, &values(phi)?).map_err(err)?)
    }

    fn extend_to_ball(&self, py: Python<'_>, phi: &Bound<'_, PyDict>) -> PyResult<Py<PyAny>> {
        let d = extend_to_ball(&self.g, &values(phi)?).map_err(err)?;
        if !verify_decomposition(&d) {
            return Err(PyRuntimeError::new_err("decomposition does not replay"));
        }
        to_py(py, &d)
    }

    fn eliminate_pair(&self, elliptic: &str, hyperbolic: &str) -> PyResult<Self> {
        moves::eliminate_pair(&self.g, elliptic, hyperbolic)
            .map(|g| PyFoliation { g })
            .map_err(err)
    }

    fn eliminate_embryo(&self, embryo: &str) -> PyResult<Self> {
        moves::eliminate_embryo(&self.g, embryo).map(|g| PyFoliation { g }).map_err(err)
    }

    fn resolve_embryo(&self, embryo: &str) -> PyResult<Self> {
        moves::resolve_embryo(&self.g, embryo).map(|g| PyFoliation { g }).map_err(err)
    }

    /// `side` is "left" or "right".
    fn resolve_homoclinic(&self, edge: &str, side: &str) -> PyResult<Self> {
        let side = match side {
            "left" => Side::Left,
            "right" => Side::Right,
            other => return Err(PyValueError::new_err(format!("unknown side {other:?}"))),
        };
        moves::resolve_homoclinic(&self.g, edge, side)
            .map(|g| PyFoliation { g })
            .map_err(err)
    }
}

/// All foliations with at most `max_saddles` saddles, up to isomorphism.
#[pyfunction]
#[pyo3(signature = (max_saddles, embryos = false, homoclinics = false))]
fn enumerate(max_saddles: usize, embryos: bool, homoclinics: bool) -> PyResult<Vec<PyFoliation>> {
    Ok(enumerate_foliations(max_saddles, embryos, homoclinics)
        .map_err(err)?
        .into_iter()
        .map(|g| PyFoliation { g })
        .collect())
}

#[pymodule]
#[pyo3(name = "sphere_taming")]
fn py_sphere_taming(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFoliation>()?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    Ok(())
}
