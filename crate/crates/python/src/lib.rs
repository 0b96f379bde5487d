//! Python bindings: series construction and algebra, the Bohr operator,
//! radius solving, campaigns and the sharpness scan.

use bohrlab::harness::{run_campaign, run_sharpness_scan, CampaignConfig, Suite};
use bohrlab::zoo::{self, BlaschkeSpec};
use bohrlab::{
    solve_radius as solve, CMatrix, Complex64, FamilyKind, FamilyParams, PolyOrder, ScalarSeries, TailBound,
    DEFAULT_TOL,
};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(bohrlab, BohrlabError, PyValueError);

fn err(e: bohrlab::Error) -> PyErr {
    BohrlabError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    BohrlabError::new_err(e.to_string())
}

/// Parses a JSON document into Python objects.
fn to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(json_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    CMatrix::from_rows(&rows).map_err(err)
}

fn parse_order(p: &Bound<'_, PyAny>) -> PyResult<PolyOrder> {
    if let Ok(n) = p.extract::<u32>() {
        return Ok(PolyOrder::Finite(n));
    }
    let s: String = p.extract()?;
    s.parse().map_err(err)
}

/// Truncated power series with square complex matrix coefficients.
#[pyclass(name = "MatrixSeries", module = "bohrlab", skip_from_py_object)]
#[derive(Clone)]
struct PySeries {
    inner: bohrlab::MatrixSeries,
}

impl From<bohrlab::MatrixSeries> for PySeries {
    fn from(inner: bohrlab::MatrixSeries) -> Self {
        Self { inner }
    }
}

impl PySeries {
    fn scalar(&self) -> PyResult<ScalarSeries> {
        ScalarSeries::try_from(self.inner.clone()).map_err(err)
    }
}

#[pymethods]
impl PySeries {
    /// `coeffs[n]` is the row-major matrix `A_n`; `coeff_bound` certifies
    /// `‖A_n‖ ≤ coeff_bound · n^coeff_growth` beyond the stored degree.
    #[new]
    #[pyo3(signature = (coeffs, coeff_bound=None, coeff_growth=0))]
    fn new(coeffs: Vec<Vec<Vec<Complex64>>>, coeff_bound: Option<f64>, coeff_growth: u32) -> PyResult<Self> {
        let coeffs = coeffs.into_iter().map(matrix).collect::<PyResult<Vec<_>>>()?;
        let tail = coeff_bound.map(|s| TailBound::polynomial(s, coeff_growth));
        Ok(bohrlab::MatrixSeries::new(coeffs, tail).map_err(err)?.into())
    }

    #[staticmethod]
    #[pyo3(signature = (coeffs, coeff_bound=None, coeff_growth=0))]
    fn scalar_series(coeffs: Vec<Complex64>, coeff_bound: Option<f64>, coeff_growth: u32) -> PyResult<Self> {
        let tail = coeff_bound.map(|s| TailBound::polynomial(s, coeff_growth));
        Ok(ScalarSeries::new(&coeffs, tail).map_err(err)?.into_matrix_series().into())
    }

    #[staticmethod]
    fn identity(dim: usize, degree: usize) -> Self {
        bohrlab::MatrixSeries::identity(dim, degree).into()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(serde_json::from_str::<bohrlab::MatrixSeries>(text).map_err(json_err)?.into())
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(json_err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn coeff_bound(&self) -> Option<(f64, u32)> {
        self.inner.tail().map(|t| (t.scale, t.growth))
    }

    fn coeffs(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.inner.coeffs().iter().map(CMatrix::to_rows).collect()
    }

    fn coeff_norms(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.majorant().map_err(err)?.norms().to_vec())
    }

    /// Enclosure `(lo, hi)` of `M_r(f) = Σ ‖A_n‖ r^n`.
    fn bohr_sum(&self, r: f64) -> PyResult<(f64, f64)> {
        let s = self.inner.bohr_sum(r).map_err(err)?;
        Ok((s.lo(), s.hi()))
    }

    fn eval(&self, z: Complex64) -> Vec<Vec<Complex64>> {
        self.inner.eval(z).to_rows()
    }

    fn truncate(&self, degree: usize) -> PyResult<Self> {
        Ok(self.inner.truncate(degree).map_err(err)?.into())
    }

    fn scale(&self, alpha: Complex64) -> Self {
        self.inner.scale(alpha).into()
    }

    fn add(&self, other: PyRef<'_, PySeries>) -> PyResult<Self> {
        Ok(self.inner.add(&other.inner).map_err(err)?.into())
    }

    fn mul(&self, other: PyRef<'_, PySeries>) -> PyResult<Self> {
        Ok(self.inner.mul(&other.inner).map_err(err)?.into())
    }

    /// `self ∘ phi` for a scalar `phi` with `phi(0) = 0`.
    fn compose(&self, phi: PyRef<'_, PySeries>) -> PyResult<Self> {
        Ok(self.inner.compose(&phi.scalar()?).map_err(err)?.into())
    }

    fn derivative(&self) -> Self {
        self.inner.derivative().into()
    }

    fn __add__(&self, other: PyRef<'_, PySeries>) -> PyResult<Self> {
        self.add(other)
    }

    fn __mul__(&self, other: PyRef<'_, PySeries>) -> PyResult<Self> {
        self.mul(other)
    }

    fn __len__(&self) -> usize {
        self.inner.degree() + 1
    }

    fn __repr__(&self) -> String {
        format!("MatrixSeries(dim={}, degree={})", self.inner.dim(), self.inner.degree())
    }
}

/// `F(z) = Σ conj(z)^l f_l(z)`.
#[pyclass(name = "PolyanalyticFn", module = "bohrlab")]
struct PyPolyanalytic {
    inner: bohrlab::PolyanalyticFn,
}

#[pymethods]
impl PyPolyanalytic {
    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.inner.k()
    }

    fn components(&self) -> Vec<PySeries> {
        self.inner.components().iter().cloned().map(PySeries::from).collect()
    }

    fn bohr_sum(&self, r: f64) -> PyResult<(f64, f64)> {
        let s = self.inner.bohr_sum(r).map_err(err)?;
        Ok((s.lo(), s.hi()))
    }

    fn eval(&self, z: Complex64) -> Vec<Vec<Complex64>> {
        self.inner.eval(z).to_rows()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        format!("PolyanalyticFn(p={}, k={}, dim={})", self.inner.order(), self.inner.k(), self.inner.dim())
    }
}

#[pyfunction]
fn op_norm(rows: Vec<Vec<Complex64>>) -> PyResult<f64> {
    matrix(rows)?.op_norm().map_err(err)
}

/// `(A*A)^{1/2}`.
#[pyfunction]
fn abs_op(rows: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(matrix(rows)?.abs_op().map_err(err)?.to_rows())
}

#[pyfunction]
#[pyo3(signature = (family, k=1.0, p=None, gamma=0.0, beta=1.0, lam=1.0, statement_form=false, tol=DEFAULT_TOL))]
#[allow(clippy::too_many_arguments)]
fn solve_radius<'py>(
    py: Python<'py>,
    family: &str,
    k: f64,
    p: Option<&Bound<'py, PyAny>>,
    gamma: f64,
    beta: f64,
    lam: f64,
    statement_form: bool,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let kind: FamilyKind = family.parse().map_err(err)?;
    let params = FamilyParams {
        lambda: lam,
        gamma,
        beta,
        k,
        p: p.map(parse_order).transpose()?.unwrap_or(PolyOrder::Finite(2)),
        statement_form,
    };
    let fam = kind.with_params(&params).map_err(err)?;
    to_py(py, &solve(&fam, tol).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (a, degree=256))]
fn mobius_extremal(a: f64, degree: usize) -> PyResult<PySeries> {
    Ok(zoo::mobius_extremal(a, degree).map_err(err)?.into_matrix_series().into())
}

#[pyfunction]
#[pyo3(signature = (zeros, rotation=Complex64::new(1.0, 0.0), degree=64))]
fn blaschke_series(zeros: Vec<Complex64>, rotation: Complex64, degree: usize) -> PyResult<PySeries> {
    let spec = BlaschkeSpec::new(zeros, rotation).map_err(err)?;
    Ok(zoo::blaschke_series(&spec, degree).map_err(err)?.into_matrix_series().into())
}

#[pyfunction]
#[pyo3(signature = (seed, dim, degree=64, fix_origin=false, scalar_head=false))]
fn schur_matrix(seed: u64, dim: usize, degree: usize, fix_origin: bool, scalar_head: bool) -> PyResult<PySeries> {
    let opts = zoo::SchurOptions {
        fix_origin,
        scalar_head,
    };
    Ok(zoo::gen_schur_matrix_seeded(seed, dim, degree, opts).map_err(err)?.into())
}

#[pyfunction]
fn build_polyanalytic(f0: PyRef<'_, PySeries>, omegas: Vec<PyRef<'_, PySeries>>, k: f64) -> PyResult<PyPolyanalytic> {
    let omegas: Vec<bohrlab::MatrixSeries> = omegas.iter().map(|o| o.inner.clone()).collect();
    Ok(PyPolyanalytic {
        inner: bohrlab::build_polyanalytic(&f0.inner, &omegas, k).map_err(err)?,
    })
}

/// Runs a verification campaign and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (
    suite, trials=100, seed=0, dim=None, degree=None, tol=None, r_grid=None,
    family="general_sc", k=1.0, p=None, beta=1.0, lam=1.0, bound=1.0,
))]
#[allow(clippy::too_many_arguments)]
fn run_suite<'py>(
    py: Python<'py>,
    suite: &str,
    trials: usize,
    seed: u64,
    dim: Option<usize>,
    degree: Option<usize>,
    tol: Option<f64>,
    r_grid: Option<Vec<f64>>,
    family: &str,
    k: f64,
    p: Option<&Bound<'py, PyAny>>,
    beta: f64,
    lam: f64,
    bound: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let suite = match suite.replace('_', "-").as_str() {
        "algebra" => Suite::Algebra,
        "schwarz" => Suite::Schwarz,
        "subordination" => Suite::Subordination,
        "quasi-subordination" => Suite::QuasiSubordination { bound, beta },
        "von-neumann" => Suite::VonNeumann,
        "coefficient-bound" => Suite::CoefficientBound,
        "composition" => Suite::Composition,
        "polyanalytic" => {
            let params = FamilyParams {
                lambda: lam,
                beta,
                k,
                p: p.map(parse_order).transpose()?.unwrap_or(PolyOrder::Finite(2)),
                ..Default::default()
            };
            let kind: FamilyKind = family.parse().map_err(err)?;
            Suite::Polyanalytic {
                family: kind.with_params(&params).map_err(err)?,
            }
        }
        other => return Err(BohrlabError::new_err(format!("unknown suite '{other}'"))),
    };
    let mut cfg = CampaignConfig::new(suite, trials, seed).map_err(err)?;
    if let Some(d) = dim {
        cfg.dim = d;
    }
    if let Some(n) = degree {
        cfg.degree = n;
    }
    if let Some(t) = tol {
        cfg.tolerance = t;
    }
    if let Some(g) = r_grid {
        cfg.r_grid = g;
    }
    let report = py.detach(|| run_campaign(&cfg)).map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (a, rmin=0.3, rmax=0.4, steps=101))]
fn sharpness_scan(py: Python<'_>, a: f64, rmin: f64, rmax: f64, steps: usize) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &run_sharpness_scan(a, rmin, rmax, steps).map_err(err)?)
}

#[pymodule(name = "bohrlab")]
fn bohrlab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BohrlabError", m.py().get_type::<BohrlabError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySeries>()?;
    m.add_class::<PyPolyanalytic>()?;
    m.add_function(wrap_pyfunction!(op_norm, m)?)?;
    m.add_function(wrap_pyfunction!(abs_op, m)?)?;
    m.add_function(wrap_pyfunction!(solve_radius, m)?)?;
    m.add_function(wrap_pyfunction!(mobius_extremal, m)?)?;
    m.add_function(wrap_pyfunction!(blaschke_series, m)?)?;
    m.add_function(wrap_pyfunction!(schur_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(build_polyanalytic, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(sharpness_scan, m)?)?;
    Ok(())
}
