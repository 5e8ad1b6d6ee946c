//! Python bindings. Rationals cross the boundary as `"p/q"` strings (ints and
//! `fractions.Fraction` are accepted on input, floats are rejected); reports
//! come back as plain dicts.

use cgf_core::approx_group::{approximate_extreme_z, build_pi_delta};
use cgf_core::approx_truncated::approximate_extreme_zplus;
use cgf_core::ccgf::{self, SFreePolyhedron as CoreSFree};
use cgf_core::minimality::check_strongly_minimal;
use cgf_core::pwl::{distance_on_interval, sup_distance};
use cgf_core::{CutFunction, GroupProblem, PeriodicSource, Rational};
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyFloat;
use serde::Serialize;

fn core_err(e: cgf_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_rational(s: &str) -> PyResult<Rational> {
    s.parse::<Rational>().map_err(|e| PyValueError::new_err(e.to_string()))
}

/// `str`, `int` or `fractions.Fraction`; the text form of the latter two is
/// already `p/q`.
fn rational(x: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if x.is_instance_of::<PyFloat>() {
        return Err(PyTypeError::new_err("floats are not accepted; pass \"p/q\" or a Fraction"));
    }
    parse_rational(&x.str()?.to_cow()?)
}

fn rationals(xs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Rational>> {
    xs.iter().map(rational).collect()
}

fn points(pts: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>) -> PyResult<Vec<(Rational, Rational)>> {
    pts.iter().map(|(x, y)| Ok((rational(x)?, rational(y)?))).collect()
}

/// Serializes through JSON so every rational reaches Python as `"p/q"`.
fn to_py(py: Python<'_>, x: &impl Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn from_json<T: serde::de::DeserializeOwned>(s: &str) -> PyResult<T> {
    serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_json(x: &impl Serialize) -> PyResult<String> {
    serde_json::to_string(x).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Piecewise-linear function with period 1.
#[pyclass(module = "cgf", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PwlPeriodic {
    inner: cgf_core::PwlPeriodic,
}

#[pymethods]
impl PwlPeriodic {
    /// `points` is a list of `(x, y)` with `x` in `[0, 1)`.
    #[new]
    fn new(points_: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>) -> PyResult<Self> {
        let inner = cgf_core::PwlPeriodic::from_points(&points(points_)?).map_err(core_err)?;
        Ok(PwlPeriodic { inner })
    }

    #[staticmethod]
    fn gmi(b: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = cgf_core::PwlPeriodic::gmi(&rational(b)?).map_err(core_err)?;
        Ok(PwlPeriodic { inner })
    }

    #[staticmethod]
    fn pi_delta(b: &Bound<'_, PyAny>, delta: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = build_pi_delta(&rational(b)?, &rational(delta)?).map_err(core_err)?;
        Ok(PwlPeriodic { inner })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        match from_json::<CutFunction>(s)? {
            CutFunction::Grid(g) => Ok(PwlPeriodic { inner: g.interpolate() }),
            other => Ok(PwlPeriodic {
                inner: other.to_quasi().to_unit_periodic().map_err(core_err)?,
            }),
        }
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&CutFunction::Periodic(self.inner.clone()))
    }

    fn eval(&self, x: &Bound<'_, PyAny>) -> PyResult<String> {
        Ok(self.inner.eval(&rational(x)?).to_string())
    }

    fn breakpoints(&self) -> Vec<(String, String)> {
        self.inner.nodes().iter().map(|n| (n.x.to_string(), n.y.to_string())).collect()
    }

    fn slopes(&self) -> Vec<String> {
        self.inner.as_quasi().slope_set().iter().map(Rational::to_string).collect()
    }

    fn sup_distance(&self, other: &PwlPeriodic) -> String {
        sup_distance(&self.inner, &other.inner).to_string()
    }

    fn convex_combination(&self, other: &PwlPeriodic, t: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PwlPeriodic {
            inner: self.inner.convex_combination(&other.inner, &rational(t)?),
        })
    }

    fn __repr__(&self) -> String {
        format!("PwlPeriodic({} breakpoints)", self.inner.nodes().len())
    }
}

/// `f(r + d) = f(r) + c`.
#[pyclass(module = "cgf", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct QuasiPeriodicPwl {
    inner: cgf_core::QuasiPeriodicPwl,
}

#[pymethods]
impl QuasiPeriodicPwl {
    /// `points` covers one period `[0, period)`.
    #[new]
    fn new(
        period: &Bound<'_, PyAny>,
        shift: &Bound<'_, PyAny>,
        points_: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>,
    ) -> PyResult<Self> {
        let inner = cgf_core::QuasiPeriodicPwl::from_points(rational(period)?, rational(shift)?, &points(points_)?)
            .map_err(core_err)?;
        Ok(QuasiPeriodicPwl { inner })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(QuasiPeriodicPwl {
            inner: from_json::<CutFunction>(s)?.to_quasi(),
        })
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&CutFunction::QuasiPeriodic(self.inner.clone()))
    }

    #[getter]
    fn period(&self) -> String {
        self.inner.period().to_string()
    }

    #[getter]
    fn shift(&self) -> String {
        self.inner.shift().to_string()
    }

    fn eval(&self, x: &Bound<'_, PyAny>) -> PyResult<String> {
        Ok(self.inner.eval(&rational(x)?).to_string())
    }

    fn breakpoints(&self) -> Vec<(String, String)> {
        self.inner.nodes().iter().map(|n| (n.x.to_string(), n.y.to_string())).collect()
    }

    fn slopes(&self) -> Vec<String> {
        self.inner.slope_set().iter().map(Rational::to_string).collect()
    }

    /// `max |f - g|` on `[-m, m]`.
    fn distance_on_interval(&self, other: &QuasiPeriodicPwl, m: &Bound<'_, PyAny>) -> PyResult<String> {
        let d = distance_on_interval(&self.inner, &other.inner, &rational(m)?).map_err(core_err)?;
        Ok(d.to_string())
    }

    fn __repr__(&self) -> String {
        format!(
            "QuasiPeriodicPwl(period={}, shift={}, {} breakpoints)",
            self.inner.period(),
            self.inner.shift(),
            self.inner.nodes().len()
        )
    }
}

/// `K = {x : a_i . x <= 1}` for the rows `a_i` of `facets`, with `S = b + Z^n`.
#[pyclass(module = "cgf", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct SFreePolyhedron {
    inner: CoreSFree,
}

#[pymethods]
impl SFreePolyhedron {
    #[new]
    fn new(b: Vec<Bound<'_, PyAny>>, facets: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let b = rationals(&b)?;
        let facets = facets.iter().map(|a| rationals(a)).collect::<PyResult<Vec<_>>>()?;
        let inner = CoreSFree::new(b.len(), b, facets).map_err(core_err)?;
        Ok(SFreePolyhedron { inner })
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(SFreePolyhedron { inner: from_json(s)? })
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn gauge(&self, r: Vec<Bound<'_, PyAny>>) -> PyResult<String> {
        let r = rationals(&r)?;
        if r.len() != self.inner.n() {
            return Err(PyValueError::new_err(format!("expected {} coordinates", self.inner.n())));
        }
        Ok(self.inner.gauge(&r).to_string())
    }

    fn norm(&self) -> String {
        self.inner.norm().to_string()
    }

    fn vertices(&self) -> PyResult<Vec<Vec<String>>> {
        let vs = self.inner.vertices().map_err(core_err)?;
        Ok(vs.iter().map(|v| v.iter().map(Rational::to_string).collect()).collect())
    }

    fn __repr__(&self) -> String {
        format!("SFreePolyhedron(n={}, {} facets)", self.inner.n(), self.inner.facets().len())
    }
}

/// Strong-minimality report for `lattice` `"z"` (`b + Z`) or `"zplus"` (`b + Z+`).
#[pyfunction]
#[pyo3(signature = (f, b, lattice = "z"))]
fn verify(py: Python<'_>, f: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>, lattice: &str) -> PyResult<Py<PyAny>> {
    let b = rational(b)?;
    let problem = match lattice {
        "z" => GroupProblem::affine(&b),
        "zplus" => GroupProblem::truncated(&b),
        other => return Err(PyValueError::new_err(format!("unknown lattice {other:?}"))),
    }
    .map_err(core_err)?;
    let quasi = if let Ok(p) = f.extract::<PyRef<'_, PwlPeriodic>>() {
        p.inner.as_quasi().clone()
    } else if let Ok(q) = f.extract::<PyRef<'_, QuasiPeriodicPwl>>() {
        q.inner.clone()
    } else {
        return Err(PyTypeError::new_err("expected PwlPeriodic or QuasiPeriodicPwl"));
    };
    let rep = check_strongly_minimal(&quasi, &problem).map_err(core_err)?;
    to_py(py, &rep)
}

/// Extreme 2-slope `pi*` within `eps` of `f` for `b + Z`; returns `(pi*, report)`.
#[pyfunction]
fn approximate_z(
    py: Python<'_>,
    f: &PwlPeriodic,
    b: &Bound<'_, PyAny>,
    eps: &Bound<'_, PyAny>,
) -> PyResult<(PwlPeriodic, Py<PyAny>)> {
    let source = PeriodicSource::Pwl(f.inner.clone());
    let out = approximate_extreme_z(&source, &rational(b)?, &rational(eps)?).map_err(core_err)?;
    Ok((PwlPeriodic { inner: out.pistar }, to_py(py, &out.report)?))
}

/// The same for `b + Z+`, with the distance bound on `[-m, m]`.
#[pyfunction]
fn approximate_zplus(
    py: Python<'_>,
    f: &QuasiPeriodicPwl,
    b: &Bound<'_, PyAny>,
    m: &Bound<'_, PyAny>,
    eps: &Bound<'_, PyAny>,
) -> PyResult<(QuasiPeriodicPwl, Py<PyAny>)> {
    let out = approximate_extreme_zplus(&f.inner, &rational(b)?, &rational(m)?, &rational(eps)?)
        .map_err(core_err)?;
    Ok((QuasiPeriodicPwl { inner: out.pistar }, to_py(py, &out.report)?))
}

#[pyfunction]
fn classify_2d(py: Python<'_>, k: &SFreePolyhedron) -> PyResult<Py<PyAny>> {
    to_py(py, &ccgf::classify_max_s_free_2d(&k.inner).map_err(core_err)?)
}

/// Verdict for a planar maximal S-free set or a simplex.
#[pyfunction]
fn extremality(py: Python<'_>, k: &SFreePolyhedron) -> PyResult<Py<PyAny>> {
    let v = if k.inner.n() == 2 {
        ccgf::classify_max_s_free_2d(&k.inner).and_then(|c| ccgf::extremality_2d(&c))
    } else {
        ccgf::simplex_extreme_test(&k.inner)
    };
    to_py(py, &v.map_err(core_err)?)
}

#[pyfunction]
fn approximate_2d(py: Python<'_>, k: &SFreePolyhedron, eps: &Bound<'_, PyAny>) -> PyResult<(SFreePolyhedron, Py<PyAny>)> {
    let out = ccgf::approximate_extreme_2d(&k.inner, &rational(eps)?).map_err(core_err)?;
    let report = to_py(py, &out)?;
    Ok((SFreePolyhedron { inner: out.polyhedron }, report))
}

#[pyfunction]
#[pyo3(signature = (n, eps, epsbar = None))]
fn delta_n(
    py: Python<'_>,
    n: usize,
    eps: &Bound<'_, PyAny>,
    epsbar: Option<&Bound<'_, PyAny>>,
) -> PyResult<(SFreePolyhedron, Py<PyAny>)> {
    let epsbar = match epsbar {
        Some(e) => rational(e)?,
        None => Rational::new(1, 100),
    };
    let d = ccgf::construct_delta_n(n, &rational(eps)?, &epsbar).map_err(core_err)?;
    let report = to_py(py, &d)?;
    Ok((SFreePolyhedron { inner: d.polyhedron }, report))
}

#[pyfunction]
fn separation_certificate(py: Python<'_>, k: &SFreePolyhedron) -> PyResult<Py<PyAny>> {
    to_py(py, &ccgf::separation_certificate(&k.inner).map_err(core_err)?)
}

#[pyfunction]
fn gauge_distance_2d(k: &SFreePolyhedron, l: &SFreePolyhedron) -> PyResult<String> {
    Ok(ccgf::gauge_distance_2d(&k.inner, &l.inner).map_err(core_err)?.to_string())
}

#[pymodule]
fn cgf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PwlPeriodic>()?;
    m.add_class::<QuasiPeriodicPwl>()?;
    m.add_class::<SFreePolyhedron>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(approximate_z, m)?)?;
    m.add_function(wrap_pyfunction!(approximate_zplus, m)?)?;
    m.add_function(wrap_pyfunction!(classify_2d, m)?)?;
    m.add_function(wrap_pyfunction!(extremality, m)?)?;
    m.add_function(wrap_pyfunction!(approximate_2d, m)?)?;
    m.add_function(wrap_pyfunction!(delta_n, m)?)?;
    m.add_function(wrap_pyfunction!(separation_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(gauge_distance_2d, m)?)?;
    Ok(())
}
