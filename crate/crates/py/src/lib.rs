//! Python bindings. Reports come back as plain dicts built from the same
//! JSON the CLI emits; rationals travel as strings like `"24/23"`.

use std::collections::HashMap;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyFloat};
use serde::Serialize;

use lops_core::analysis::sphere::transverse_directions;
use lops_core::analysis::{analyze, cone_sample, AnalysisConfig};
use lops_core::ens::{build_ens_system, reference_product, verify_ens, FluidState, VerifyConfig};
use lops_core::lab::{run_lab, LabConfig, STANDARD_SEED};
use lops_core::poly::{Assignment, Atom, Homogeneity, Poly};
use lops_core::rational::{fmt_q, parse_q, q as int_q, ratio, Q};
use lops_core::system::{parse_system, print_system, LeraySystem};

create_exception!(lops, LopsError, PyValueError);

fn err(e: impl std::fmt::Display) -> PyErr {
    LopsError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Accepts ints, strings like `"-3/4"` and `fractions.Fraction`.
fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Q> {
    if obj.is_instance_of::<PyFloat>() {
        return Err(err("floats are not exact; pass an int, a string like \"1/2\" or a Fraction"));
    }
    let text = obj.str()?.to_string();
    parse_q(&text).ok_or_else(|| err(format!("not a rational: `{text}`")))
}

fn rational_or(obj: Option<Bound<'_, PyAny>>, default: Q) -> PyResult<Q> {
    obj.map_or(Ok(default), |o| rational(&o))
}

fn tau(values: Option<Vec<Bound<'_, PyAny>>>) -> PyResult<[Q; 4]> {
    let Some(values) = values else {
        return Ok(AnalysisConfig::default().tau);
    };
    let parsed = values.iter().map(rational).collect::<PyResult<Vec<Q>>>()?;
    parsed.try_into().map_err(|v: Vec<Q>| err(format!("tau needs 4 components, got {}", v.len())))
}

fn assignment(values: &Bound<'_, PyDict>) -> PyResult<Assignment> {
    values
        .iter()
        .map(|(k, v)| Ok((Atom::from_text(&k.extract::<String>()?), rational(&v)?)))
        .collect()
}

/// Exact polynomial over the rationals in `xi0..xi3` and named parameters.
#[pyclass(name = "Poly", module = "lops", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPoly(Poly);

fn poly_arg(obj: &Bound<'_, PyAny>) -> PyResult<Poly> {
    if let Ok(p) = obj.cast::<PyPoly>() {
        return Ok(p.get().0.clone());
    }
    if let Ok(s) = obj.extract::<String>() {
        return s.parse().map_err(err);
    }
    Ok(Poly::constant(rational(obj)?))
}

#[pymethods]
impl PyPoly {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PyPoly).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Poly('{}')", self.0)
    }

    fn __add__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyPoly(&self.0 + &poly_arg(other)?))
    }

    fn __radd__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.__add__(other)
    }

    fn __sub__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyPoly(&self.0 - &poly_arg(other)?))
    }

    fn __rsub__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyPoly(&poly_arg(other)? - &self.0))
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyPoly(&self.0 * &poly_arg(other)?))
    }

    fn __rmul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.__mul__(other)
    }

    fn __neg__(&self) -> Self {
        PyPoly(&Poly::zero() - &self.0)
    }

    fn __pow__(&self, e: u32, _modulo: Option<Py<PyAny>>) -> Self {
        PyPoly(self.0.pow(e))
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.0.to_string().hash(&mut h);
        h.finish()
    }

    /// Total degree.
    fn degree(&self) -> u32 {
        self.0.degree()
    }

    /// Degree in the covector atoms, or None when not homogeneous.
    fn xi_degree(&self) -> Option<u32> {
        match self.0.xi_homogeneity() {
            Homogeneity::Degree(d) => Some(d),
            Homogeneity::Zero => Some(0),
            Homogeneity::NotHomogeneous => None,
        }
    }

    fn atoms(&self) -> Vec<String> {
        self.0.atoms().into_iter().map(|a| a.to_string()).collect()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Exact value at a full assignment, as a rational string.
    fn eval(&self, values: &Bound<'_, PyDict>) -> PyResult<String> {
        self.0.eval(&assignment(values)?).map(|v| fmt_q(&v)).map_err(err)
    }

    /// Replaces atoms by polynomials (or anything convertible to one).
    fn substitute(&self, bindings: &Bound<'_, PyDict>) -> PyResult<Self> {
        let map = bindings
            .iter()
            .map(|(k, v)| Ok((Atom::from_text(&k.extract::<String>()?), poly_arg(&v)?)))
            .collect::<PyResult<HashMap<Atom, Poly>>>()?;
        Ok(PyPoly(self.0.substitute(&map)))
    }

    /// Quotient when `other` divides exactly; raises otherwise.
    fn exact_div(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.0.exact_div(&poly_arg(other)?).map(PyPoly).map_err(err)
    }
}

/// A block system with Leray-Ohya indices.
#[pyclass(name = "System", module = "lops", frozen)]
struct PySystem(LeraySystem);

#[pymethods]
impl PySystem {
    /// Parses `.lops` source text.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_system(text).map(PySystem).map_err(err)
    }

    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The Einstein-Navier-Stokes reference instance.
    #[staticmethod]
    fn ens() -> Self {
        PySystem(build_ens_system())
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    /// `(name, multiplicity, m)` per unknown block.
    #[getter]
    fn unknowns(&self) -> Vec<(String, usize, i64)> {
        self.0.unknowns.iter().map(|u| (u.name.clone(), u.multiplicity, u.m)).collect()
    }

    /// `(name, multiplicity, n)` per equation block.
    #[getter]
    fn equations(&self) -> Vec<(String, usize, i64)> {
        self.0.equations.iter().map(|e| (e.name.clone(), e.multiplicity, e.n)).collect()
    }

    /// Sum of m over unknowns minus sum of n over equations.
    #[getter]
    fn total_order(&self) -> i64 {
        self.0.total_order()
    }

    fn validate(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.validate_structure())
    }

    #[pyo3(signature = (tau=None, samples=1000, tol=1e-9, seed=0))]
    fn analyze(
        &self,
        py: Python<'_>,
        tau: Option<Vec<Bound<'_, PyAny>>>,
        samples: usize,
        tol: f64,
        seed: u64,
    ) -> PyResult<Py<PyAny>> {
        let cfg = AnalysisConfig { tau: self::tau(tau)?, samples, tol, seed };
        let report = py.detach(|| analyze(&self.0, &cfg)).map_err(err)?;
        to_py(py, &report)
    }

    fn __str__(&self) -> String {
        print_system(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("System('{}')", self.0.name)
    }
}

#[pyfunction]
#[pyo3(signature = (samples=20, directions=1000, tol=1e-9, seed=0, q=None, f=None, skip_symbolic=false))]
#[allow(clippy::too_many_arguments)]
fn ens_verify(
    py: Python<'_>,
    samples: usize,
    directions: usize,
    tol: f64,
    seed: u64,
    q: Option<Bound<'_, PyAny>>,
    f: Option<Bound<'_, PyAny>>,
    skip_symbolic: bool,
) -> PyResult<Py<PyAny>> {
    let cfg = VerifyConfig {
        samples,
        directions,
        tol,
        seed,
        q: rational_or(q, ratio(1, 2))?,
        f: rational_or(f, int_q(1))?,
        skip_symbolic,
        ..VerifyConfig::default()
    };
    let report = py.detach(|| verify_ens(&cfg)).map_err(err)?;
    to_py(py, &report)
}

/// Real roots of one reference factor along `eta + s tau` at a Minkowski
/// rest state.
#[pyfunction]
#[pyo3(signature = (factor="light", n=100, q=None, f=None, tau=None, tol=1e-9, seed=0))]
#[allow(clippy::too_many_arguments)]
fn cones(
    py: Python<'_>,
    factor: &str,
    n: usize,
    q: Option<Bound<'_, PyAny>>,
    f: Option<Bound<'_, PyAny>>,
    tau: Option<Vec<Bound<'_, PyAny>>>,
    tol: f64,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let tau = self::tau(tau)?;
    let state = FluidState::minkowski_rest(rational_or(f, int_q(1))?, rational_or(q, ratio(1, 2))?);
    let product = reference_product(&state).map_err(err)?;
    let chosen = product
        .factors
        .iter()
        .find(|x| x.name == factor)
        .ok_or_else(|| err(format!("unknown factor `{factor}`")))?;
    let light = state.light();
    let samples = py
        .detach(|| {
            let dirs = transverse_directions(&tau, n, seed);
            cone_sample(&chosen.name, &chosen.poly, &tau, &Assignment::new(), &dirs, Some(&light), tol)
        })
        .map_err(err)?;
    to_py(py, &samples)
}

/// Finite-difference tensor identity checks over refined grids.
#[pyfunction]
#[pyo3(signature = (h=0.1, refine=2, nodes=9, vartheta=-1.0, seed=STANDARD_SEED))]
fn lab_run(py: Python<'_>, h: f64, refine: usize, nodes: usize, vartheta: f64, seed: u64) -> PyResult<Py<PyAny>> {
    let cfg = LabConfig { h, refine, nodes, vartheta, seed };
    let report = py.detach(|| run_lab(&cfg)).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn lops(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("LopsError", m.py().get_type::<LopsError>())?;
    m.add_class::<PyPoly>()?;
    m.add_class::<PySystem>()?;
    m.add_function(wrap_pyfunction!(ens_verify, m)?)?;
    m.add_function(wrap_pyfunction!(cones, m)?)?;
    m.add_function(wrap_pyfunction!(lab_run, m)?)?;
    Ok(())
}
