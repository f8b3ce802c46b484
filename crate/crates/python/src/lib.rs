//! Python bindings for `relent_core`.
//!
//! Matrices cross the boundary as nested lists of complex numbers; infinite
//! relative entropies become `float("inf")`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use relent_core::channels::{self, apply_channel, apply_complementary, partial_trace_kraus};
use relent_core::entropy;
use relent_core::inequalities::{self, SearchConfig, StateClass};
use relent_core::linalg::{self, ComplexMatrix};
use relent_core::states;
use relent_core::{Error, InequalityId, Subsystem};

create_exception!(relent, ShapeError, PyValueError);
create_exception!(relent, DomainError, PyValueError);
create_exception!(relent, ConfigError, PyValueError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Size(_) | Error::Shape(_) => ShapeError::new_err(msg),
        Error::Domain(_) => DomainError::new_err(msg),
        Error::Config(_) => ConfigError::new_err(msg),
        Error::Overflow(_) => PyOverflowError::new_err(msg),
        Error::Json(_) => PyValueError::new_err(msg),
        Error::Io(_) => PyOSError::new_err(msg),
    }
}

type Rows = Vec<Vec<Complex64>>;

fn matrix_from_rows(rows: Rows) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(ShapeError::new_err("ragged matrix rows"));
    }
    Ok(ComplexMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn rows_from_matrix(m: &ComplexMatrix) -> Rows {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn subsystem(name: &str) -> PyResult<Subsystem> {
    match name {
        "A" | "a" => Ok(Subsystem::A),
        "B" | "b" => Ok(Subsystem::B),
        other => Err(PyValueError::new_err(format!("subsystem must be 'A' or 'B', got {other:?}"))),
    }
}

/// A validated density matrix, optionally carrying a tensor factorisation.
#[pyclass(frozen, skip_from_py_object, module = "relent")]
#[derive(Clone)]
pub struct DensityMatrix(linalg::DensityMatrix);

#[pymethods]
impl DensityMatrix {
    #[new]
    #[pyo3(signature = (rows, dims=None))]
    fn new(rows: Rows, dims: Option<Vec<usize>>) -> PyResult<Self> {
        let rho = linalg::DensityMatrix::new(matrix_from_rows(rows)?).map_err(to_py)?;
        with_dims(rho, dims)
    }

    #[staticmethod]
    #[pyo3(signature = (weights, dims=None))]
    fn from_diagonal(weights: Vec<f64>, dims: Option<Vec<usize>>) -> PyResult<Self> {
        with_dims(linalg::DensityMatrix::from_diagonal(&weights).map_err(to_py)?, dims)
    }

    #[staticmethod]
    fn maximally_mixed(d: usize) -> Self {
        Self(linalg::DensityMatrix::maximally_mixed(d))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn dims(&self) -> Option<Vec<usize>> {
        self.0.dims().map(<[usize]>::to_vec)
    }

    fn to_list(&self) -> Rows {
        rows_from_matrix(self.0.matrix())
    }

    /// Eigenvalues in decreasing order.
    fn spectrum(&self) -> Vec<f64> {
        self.0.spectrum()
    }

    fn diagonal(&self) -> Vec<f64> {
        self.0.diagonal()
    }

    /// Partial trace keeping subsystem "A" or "B".
    fn reduce(&self, keep: &str) -> PyResult<Self> {
        Ok(Self(self.0.reduce(subsystem(keep)?).map_err(to_py)?))
    }

    fn tensor(&self, other: &DensityMatrix) -> PyResult<Self> {
        Ok(Self(self.0.tensor(&other.0).map_err(to_py)?))
    }

    fn entropy(&self) -> f64 {
        entropy::von_neumann_entropy(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dim={}, dims={:?})", self.0.dim(), self.0.dims())
    }
}

fn with_dims(rho: linalg::DensityMatrix, dims: Option<Vec<usize>>) -> PyResult<DensityMatrix> {
    match dims {
        Some(d) => Ok(DensityMatrix(rho.with_dims(&d).map_err(to_py)?)),
        None => Ok(DensityMatrix(rho)),
    }
}

/// A (rho, sigma) pair on a shared space.
#[pyclass(frozen, skip_from_py_object, module = "relent")]
#[derive(Clone)]
pub struct StatePair(states::StatePair);

#[pymethods]
impl StatePair {
    #[new]
    #[pyo3(signature = (rho, sigma, dims=None))]
    fn new(rho: &DensityMatrix, sigma: &DensityMatrix, dims: Option<[usize; 2]>) -> PyResult<Self> {
        let pair = match dims {
            Some(d) => states::StatePair::bipartite(rho.0.clone(), sigma.0.clone(), d),
            None => states::StatePair::new(rho.0.clone(), sigma.0.clone()),
        };
        Ok(Self(pair.map_err(to_py)?))
    }

    /// Orthogonal pure-state counterexample with parameter `lam`.
    #[staticmethod]
    #[pyo3(signature = (lam, d_a=2, d_b=2))]
    fn example1(lam: f64, d_a: usize, d_b: usize) -> PyResult<Self> {
        Ok(Self(states::example1_states(lam, d_a, d_b).map_err(to_py)?))
    }

    /// Full-rank diagonal two-qubit counterexample.
    #[staticmethod]
    fn example2() -> Self {
        Self(states::example2_states())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let json = serde_json::from_str(text).map_err(|e| to_py(e.into()))?;
        Ok(Self(states::StatePair::from_json(&json).map_err(to_py)?))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0.to_json()).map_err(|e| to_py(e.into()))
    }

    #[getter]
    fn rho(&self) -> DensityMatrix {
        DensityMatrix(self.0.rho.clone())
    }

    #[getter]
    fn sigma(&self) -> DensityMatrix {
        DensityMatrix(self.0.sigma.clone())
    }
}

/// A quantum channel in Kraus form.
#[pyclass(frozen, skip_from_py_object, module = "relent")]
#[derive(Clone)]
pub struct KrausSet(channels::KrausSet);

#[pymethods]
impl KrausSet {
    #[new]
    fn new(operators: Vec<Rows>) -> PyResult<Self> {
        let ops = operators.into_iter().map(matrix_from_rows).collect::<PyResult<Vec<_>>>()?;
        Ok(Self(channels::KrausSet::new(ops).map_err(to_py)?))
    }

    #[staticmethod]
    fn identity(d: usize) -> Self {
        Self(channels::KrausSet::identity(d))
    }

    /// Trace out subsystem `traced` ("A" or "B") of a `d_A x d_B` system.
    #[staticmethod]
    fn partial_trace(dims: [usize; 2], traced: &str) -> PyResult<Self> {
        Ok(Self(partial_trace_kraus(dims, subsystem(traced)?).map_err(to_py)?))
    }

    #[getter]
    fn dim_in(&self) -> usize {
        self.0.dim_in()
    }

    #[getter]
    fn dim_out(&self) -> usize {
        self.0.dim_out()
    }

    #[getter]
    fn env_dim(&self) -> usize {
        self.0.env_dim()
    }

    fn apply(&self, rho: &DensityMatrix) -> PyResult<DensityMatrix> {
        Ok(DensityMatrix(apply_channel(&self.0, &rho.0).map_err(to_py)?))
    }

    fn complementary(&self, rho: &DensityMatrix) -> PyResult<DensityMatrix> {
        Ok(DensityMatrix(apply_complementary(&self.0, &rho.0).map_err(to_py)?))
    }

    #[pyo3(signature = (tol=channels::TOL_CHANNEL))]
    fn is_unital(&self, tol: f64) -> bool {
        self.0.is_unital(tol)
    }
}

/// Slack and verdict for one inequality.
#[pyclass(frozen, skip_from_py_object, module = "relent")]
#[derive(Clone)]
pub struct GapReport(inequalities::GapReport);

#[pymethods]
impl GapReport {
    #[getter]
    fn id(&self) -> &'static str {
        self.0.id.code()
    }

    #[getter]
    fn lhs(&self) -> f64 {
        self.0.lhs.to_f64()
    }

    #[getter]
    fn rhs(&self) -> Vec<f64> {
        self.0.rhs.iter().map(|x| x.to_f64()).collect()
    }

    #[getter]
    fn slack(&self) -> f64 {
        self.0.slack()
    }

    #[getter]
    fn verdict(&self) -> String {
        self.0.verdict.to_string()
    }

    #[getter]
    fn stream(&self) -> Option<u64> {
        self.0.stream
    }

    fn verdict_label(&self) -> String {
        self.0.verdict_label()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| to_py(e.into()))
    }

    fn __repr__(&self) -> String {
        format!("GapReport(id={}, slack={:e}, verdict={})", self.0.id, self.0.slack(), self.0.verdict)
    }
}

/// ChaCha20 generator addressed by (seed, stream).
#[pyclass(module = "relent")]
pub struct SeededGenerator(states::SeededGenerator);

#[pymethods]
impl SeededGenerator {
    #[new]
    #[pyo3(signature = (seed, stream=0))]
    fn new(seed: u64, stream: u64) -> Self {
        Self(states::SeededGenerator::new(seed, stream))
    }

    /// Hilbert–Schmidt random state of the given rank (default full).
    #[pyo3(signature = (d, rank=None))]
    fn random_density(&mut self, d: usize, rank: Option<usize>) -> PyResult<DensityMatrix> {
        let r = states::random_density(d, rank.unwrap_or(d), &mut self.0).map_err(to_py)?;
        Ok(DensityMatrix(r))
    }

    fn random_unitary(&mut self, d: usize) -> Rows {
        rows_from_matrix(&states::random_unitary(d, &mut self.0))
    }

    /// Commuting pair with distinct spectra and the pinching onto its basis.
    fn hayashi_pair(&mut self, d: usize) -> PyResult<(StatePair, KrausSet)> {
        let (pair, k) = states::hayashi_pair(d, &mut self.0).map_err(to_py)?;
        Ok((StatePair(pair), KrausSet(k)))
    }
}

#[pyfunction]
fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy::von_neumann_entropy(&rho.0)
}

/// S(rho||sigma) in nats; `inf` when supp(rho) is not inside supp(sigma).
#[pyfunction]
fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> PyResult<f64> {
    Ok(entropy::relative_entropy(&rho.0, &sigma.0).map_err(to_py)?.to_f64())
}

#[pyfunction]
fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> PyResult<f64> {
    linalg::trace_distance(&rho.0, &sigma.0).map_err(to_py)
}

#[pyfunction]
fn superadditivity_gap(pair: &StatePair) -> PyResult<GapReport> {
    Ok(GapReport(inequalities::superadditivity_gap(&pair.0).map_err(to_py)?))
}

#[pyfunction]
fn channel_complement_gap(rho: &DensityMatrix, sigma: &DensityMatrix, k: &KrausSet) -> PyResult<GapReport> {
    Ok(GapReport(inequalities::channel_complement_gap(&rho.0, &sigma.0, &k.0).map_err(to_py)?))
}

#[pyfunction]
fn uniform_monotonicity_gap(rho: &DensityMatrix, k: &KrausSet) -> PyResult<GapReport> {
    Ok(GapReport(inequalities::uniform_monotonicity_gap(&rho.0, &k.0).map_err(to_py)?))
}

#[pyfunction]
fn weak_superadditivity_slack(pair: &StatePair) -> PyResult<GapReport> {
    Ok(GapReport(inequalities::weak_superadditivity_slack(&pair.0).map_err(to_py)?))
}

/// `(min, max)` of S(U rho U^dagger||sigma) over all unitaries.
#[pyfunction]
fn unitary_orbit_extrema(rho: &DensityMatrix, sigma: &DensityMatrix) -> PyResult<(f64, f64)> {
    let e = inequalities::unitary_orbit_extrema(&rho.0, &sigma.0).map_err(to_py)?;
    Ok((e.min_value, e.max_value))
}

/// Seeded violation search. Returns the confirmed violations (or every
/// trial with `emit_all`) and a summary dict.
#[pyfunction]
#[pyo3(signature = (ineq, dims=(2, 2), trials=1000, seed=0, state_class="full-rank", emit_all=false))]
fn violation_search<'py>(
    py: Python<'py>,
    ineq: &str,
    dims: (usize, usize),
    trials: u64,
    seed: u64,
    state_class: &str,
    emit_all: bool,
) -> PyResult<(Vec<GapReport>, Bound<'py, PyDict>)> {
    let id: InequalityId = ineq.parse().map_err(to_py)?;
    let class: StateClass = state_class.parse().map_err(to_py)?;
    let mut config = SearchConfig::new(id, [dims.0, dims.1], class, trials, seed);
    config.emit_all = emit_all;
    let outcome = py.detach(|| inequalities::violation_search(&config)).map_err(to_py)?;
    let s = &outcome.summary;
    let summary = PyDict::new(py);
    summary.set_item("trials", s.trials)?;
    summary.set_item("violations", s.violations)?;
    summary.set_item("unconfirmed", s.unconfirmed)?;
    summary.set_item("indeterminate", s.indeterminate)?;
    summary.set_item("min_slack", s.min_slack.0)?;
    summary.set_item("max_slack", s.max_slack.0)?;
    summary.set_item("wall_time_s", s.wall_time_s)?;
    Ok((outcome.reports.into_iter().map(GapReport).collect(), summary))
}

#[pymodule]
fn relent(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<DensityMatrix>()?;
    m.add_class::<StatePair>()?;
    m.add_class::<KrausSet>()?;
    m.add_class::<GapReport>()?;
    m.add_class::<SeededGenerator>()?;
    m.add_function(wrap_pyfunction!(von_neumann_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(relative_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(trace_distance, m)?)?;
    m.add_function(wrap_pyfunction!(superadditivity_gap, m)?)?;
    m.add_function(wrap_pyfunction!(channel_complement_gap, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_monotonicity_gap, m)?)?;
    m.add_function(wrap_pyfunction!(weak_superadditivity_slack, m)?)?;
    m.add_function(wrap_pyfunction!(unitary_orbit_extrema, m)?)?;
    m.add_function(wrap_pyfunction!(violation_search, m)?)?;
    m.add("ShapeError", m.py().get_type::<ShapeError>())?;
    m.add("DomainError", m.py().get_type::<DomainError>())?;
    m.add("ConfigError", m.py().get_type::<ConfigError>())?;
    m.add("TOL_VERDICT", inequalities::TOL_VERDICT)?;
    Ok(())
}
