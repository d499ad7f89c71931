//! Python bindings. Rationals cross the boundary as `"num/den"` strings or
//! Python ints; reports come back as plain dicts.

use hyperpencil::arith::{factorize, format_rational, is_prime, parse_rational, BigInt, BigRational, Compact, RatPoly};
use hyperpencil::gap::{
    ball_cover, certified_bound, cone_assign, total_bound, vojta_mumford_chain, GapParams, GramLattice, Vector,
};
use hyperpencil::io::LatticeInstance;
use hyperpencil::pencil::{self, FiberParams};
use hyperpencil::points::{enumerate_points, SearchConfig};
use hyperpencil::rank::rank_bound;
use hyperpencil::survey::{self, FiberOptions, DEFAULT_MEMORY_BUDGET};
use hyperpencil::PencilSpec;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Accepts a Python int or a `"num/den"` string.
fn rational(obj: &Bound<'_, PyAny>) -> PyResult<BigRational> {
    if let Ok(n) = obj.extract::<BigInt>() {
        return Ok(BigRational::from_integer(n));
    }
    let text: String = obj.extract()?;
    parse_rational(&text).map_err(value_error)
}

fn rationals(obj: &Bound<'_, PyAny>) -> PyResult<Vec<BigRational>> {
    obj.try_iter()?.map(|item| rational(&item?)).collect()
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => {
            let text = n.to_string();
            match text.parse::<BigInt>() {
                Ok(i) => i.into_pyobject(py)?.into_any(),
                Err(_) => text.parse::<f64>().map_err(value_error)?.into_pyobject(py)?.into_any(),
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &value)
}

/// The pencil `y^2 = (x - s) Q(x)`.
#[pyclass(name = "Pencil", module = "hyperpencil_py", frozen)]
struct PyPencil {
    spec: PencilSpec,
}

impl PyPencil {
    fn fiber(&self, s: &Bound<'_, PyAny>) -> PyResult<FiberParams> {
        let s = rational(s)?;
        pencil::fiber_params_from_rational(&self.spec, &s).map_err(value_error)
    }
}

#[pymethods]
impl PyPencil {
    /// `coefficients` of Q, lowest degree first, as ints or `"num/den"` strings.
    #[new]
    fn new(coefficients: &Bound<'_, PyAny>) -> PyResult<Self> {
        let spec = PencilSpec::new(RatPoly::new(rationals(coefficients)?)).map_err(value_error)?;
        Ok(PyPencil { spec })
    }

    /// `Q = x(x-2)(x-6)(x-8)(x-12)(x-20)`.
    #[staticmethod]
    fn paper_example() -> Self {
        PyPencil { spec: PencilSpec::sextic_example() }
    }

    #[getter]
    fn degree(&self) -> usize {
        self.spec.degree()
    }

    #[getter]
    fn genus(&self) -> usize {
        self.spec.genus()
    }

    #[getter]
    fn disc_q(&self) -> String {
        format_rational(self.spec.disc_q())
    }

    #[getter]
    fn coefficients(&self) -> Vec<String> {
        self.spec.q_poly().coeffs().iter().map(format_rational).collect()
    }

    fn rational_roots(&self) -> Vec<String> {
        self.spec.rational_roots().iter().map(format_rational).collect()
    }

    /// `disc(Q) Q(s)^2` as `"num/den"`.
    fn delta(&self, s: &Bound<'_, PyAny>) -> PyResult<String> {
        Ok(format_rational(&pencil::delta(&self.spec, &self.fiber(s)?)))
    }

    /// Discriminant of `(x - s) Q(x)` through the resultant.
    fn delta_via_resultant(&self, s: &Bound<'_, PyAny>) -> PyResult<String> {
        let d = pencil::delta_via_resultant(&self.spec, &self.fiber(s)?).map_err(value_error)?;
        Ok(format_rational(&d))
    }

    /// `(bq)^(2d-2) Delta(s)`.
    fn integral_disc(&self, s: &Bound<'_, PyAny>) -> PyResult<BigInt> {
        pencil::integral_disc(&self.spec, &self.fiber(s)?).map_err(value_error)
    }

    #[pyo3(signature = (s, deg_k = 1, pid_correction = 0, c = 1.0))]
    fn rank_bound<'py>(
        &self,
        py: Python<'py>,
        s: &Bound<'py, PyAny>,
        deg_k: u32,
        pid_correction: u64,
        c: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let report = rank_bound(&self.spec, &self.fiber(s)?, deg_k, pid_correction).map_err(value_error)?;
        serialize(py, &report.to_record(c))
    }

    /// Affine points `(x, y)` with `y >= 0` and x-height at most `height`.
    #[pyo3(signature = (s, height, use_sieve = true))]
    fn points(&self, s: &Bound<'_, PyAny>, height: u64, use_sieve: bool) -> PyResult<Vec<(String, String)>> {
        let fp = self.fiber(s)?;
        let cfg = SearchConfig { use_sieve, ..SearchConfig::with_height(height) };
        Ok(enumerate_points(&self.spec, &fp, &cfg)
            .iter()
            .map(|r| (Compact(&r.x).to_string(), Compact(&r.y).to_string()))
            .collect())
    }

    #[pyo3(signature = (s, height = 100, c = 1.0, deg_k = 1, pid_correction = 0))]
    fn fiber_report<'py>(
        &self,
        py: Python<'py>,
        s: &Bound<'py, PyAny>,
        height: u64,
        c: f64,
        deg_k: u32,
        pid_correction: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let fp = self.fiber(s)?;
        let opts = FiberOptions { c, deg_k, pid_correction };
        let rep = survey::fiber_report(&self.spec, &fp, &SearchConfig::with_height(height), &opts).map_err(value_error)?;
        serialize(py, &rep)
    }

    #[pyo3(signature = (s_to, t))]
    fn low_omega<'py>(&self, py: Python<'py>, s_to: u64, t: usize) -> PyResult<Bound<'py, PyAny>> {
        let rep = survey::cmd_low_omega(&self.spec, s_to, t, DEFAULT_MEMORY_BUDGET).map_err(value_error)?;
        serialize(py, &rep)
    }

    fn __repr__(&self) -> String {
        format!("Pencil(Q = {})", self.spec.q_poly())
    }
}

/// A Gram form on `R^rho`.
#[pyclass(name = "Lattice", module = "hyperpencil_py", frozen)]
struct PyLattice {
    lat: GramLattice,
}

impl PyLattice {
    fn vectors(obj: &Bound<'_, PyAny>) -> PyResult<Vec<Vector>> {
        obj.try_iter()?.map(|v| rationals(&v?)).collect()
    }
}

#[pymethods]
impl PyLattice {
    #[new]
    fn new(gram: &Bound<'_, PyAny>) -> PyResult<Self> {
        let rows = PyLattice::vectors(gram)?;
        Ok(PyLattice { lat: GramLattice::new(rows).map_err(value_error)? })
    }

    #[staticmethod]
    fn identity(rho: usize) -> Self {
        PyLattice { lat: GramLattice::identity(rho) }
    }

    #[getter]
    fn rho(&self) -> usize {
        self.lat.rho()
    }

    fn inner(&self, u: &Bound<'_, PyAny>, v: &Bound<'_, PyAny>) -> PyResult<String> {
        let ip = self.lat.inner(&rationals(u)?, &rationals(v)?).map_err(value_error)?;
        Ok(format_rational(&ip))
    }

    /// Greedy cover: returns `(center indices, assignment)`.
    fn ball_cover(&self, points: &Bound<'_, PyAny>, radius_sq: &Bound<'_, PyAny>) -> PyResult<(Vec<usize>, Vec<usize>)> {
        let cover = ball_cover(&self.lat, &PyLattice::vectors(points)?, &rational(radius_sq)?).map_err(value_error)?;
        Ok((cover.centers, cover.assignment))
    }

    /// Cone groups as lists of input indices.
    fn cone_assign(&self, vectors: &Bound<'_, PyAny>, c1: &Bound<'_, PyAny>) -> PyResult<Vec<Vec<usize>>> {
        let a = cone_assign(&self.lat, &PyLattice::vectors(vectors)?, &rational(c1)?).map_err(value_error)?;
        Ok(a.groups)
    }
}

fn params(c: &Bound<'_, PyAny>, deg_c: u32, kappa: &Bound<'_, PyAny>, c3: &Bound<'_, PyAny>, c2_ball: &Bound<'_, PyAny>) -> PyResult<GapParams> {
    GapParams::new(rational(c)?, deg_c, rational(kappa)?, rational(c3)?, rational(c2_ball)?).map_err(value_error)
}

/// Runs the counting chain on a lattice instance in the TOML file format.
#[pyfunction]
#[pyo3(signature = (lattice_toml, c = None, deg_c = None))]
fn gap_sim<'py>(py: Python<'py>, lattice_toml: &str, c: Option<&Bound<'py, PyAny>>, deg_c: Option<u32>) -> PyResult<Bound<'py, PyAny>> {
    let inst = LatticeInstance::parse(lattice_toml).map_err(value_error)?;
    let mut p = inst.gap_params.clone().unwrap_or_default();
    if let Some(c) = c {
        p.c = rational(c)?;
    }
    if let Some(d) = deg_c {
        p.deg_c = d;
    }
    let trace = vojta_mumford_chain(&inst.lattice, &inst.vectors, inst.stab_classes.as_deref(), &p).map_err(value_error)?;
    serialize(py, &trace)
}

/// `deg^2 floor((1 + sqrt(8 c1))^rho) max{2, c c2 deg + 1}` as a string.
#[pyfunction]
#[pyo3(name = "certified_bound")]
fn certified_bound_py(c: &Bound<'_, PyAny>, deg_c: u32, rho: usize) -> PyResult<String> {
    let one = 1i64.into_pyobject(c.py())?.into_any();
    let p = params(c, deg_c, &one, &one, &one)?;
    Ok(Compact(&certified_bound(&p, rho)).to_string())
}

/// `c1^rho + c2_ball (1 + 2 sqrt(c1 c3))^rho` as a float.
#[pyfunction]
#[pyo3(name = "total_bound")]
fn total_bound_py(c: &Bound<'_, PyAny>, deg_c: u32, c3: &Bound<'_, PyAny>, c2_ball: &Bound<'_, PyAny>, rho: usize) -> PyResult<f64> {
    let one = 1i64.into_pyobject(c.py())?.into_any();
    let p = params(c, deg_c, &one, c3, c2_ball)?;
    Ok(total_bound(&p, rho).to_f64())
}

/// Prime factorization as `[(p, e), ...]`.
#[pyfunction]
#[pyo3(name = "factorize")]
fn factorize_py(n: BigInt) -> PyResult<Vec<(BigInt, u32)>> {
    Ok(factorize(&n).map_err(value_error)?.factors().to_vec())
}

#[pyfunction]
#[pyo3(name = "is_prime")]
fn is_prime_py(n: BigInt) -> bool {
    is_prime(&n)
}

#[pyfunction]
fn omega_stats<'py>(py: Python<'py>, s_to: u64) -> PyResult<Bound<'py, PyAny>> {
    let stats = survey::omega_stats(None, s_to, DEFAULT_MEMORY_BUDGET).map_err(value_error)?;
    serialize(py, &stats)
}

#[pymodule]
fn hyperpencil_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPencil>()?;
    m.add_class::<PyLattice>()?;
    m.add_function(wrap_pyfunction!(gap_sim, m)?)?;
    m.add_function(wrap_pyfunction!(certified_bound_py, m)?)?;
    m.add_function(wrap_pyfunction!(total_bound_py, m)?)?;
    m.add_function(wrap_pyfunction!(factorize_py, m)?)?;
    m.add_function(wrap_pyfunction!(is_prime_py, m)?)?;
    m.add_function(wrap_pyfunction!(omega_stats, m)?)?;
    Ok(())
}
