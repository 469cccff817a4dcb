//! Python bindings. Matrices cross the boundary as nested lists of floats;
//! opcodes, precision modes and schemes are passed by name.

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use semiring_mxu as core;
use semiring_mxu::{ClosureScheme, Error, PrecisionMode, SemiringOp};

create_exception!(semiring_mxu, SemiringError, PyValueError);
create_exception!(semiring_mxu, DomainError, SemiringError);
create_exception!(semiring_mxu, NonConvergenceError, SemiringError);
create_exception!(semiring_mxu, DagRequiredError, SemiringError);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Domain { .. } => DomainError::new_err(msg),
        Error::NonConvergence { .. } => NonConvergenceError::new_err(msg),
        Error::DagRequired => DagRequiredError::new_err(msg),
        Error::Io { .. } => PyOSError::new_err(msg),
        _ => SemiringError::new_err(msg),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn op(name: &str) -> PyResult<SemiringOp> {
    name.parse().py()
}

fn mode(name: &str) -> PyResult<PrecisionMode> {
    name.parse().py()
}

fn scheme(name: &str) -> PyResult<ClosureScheme> {
    match name {
        "bf" | "bellman_ford" => Ok(ClosureScheme::BellmanFord),
        "leyzorek" => Ok(ClosureScheme::Leyzorek),
        other => Err(SemiringError::new_err(format!("unknown scheme '{other}'"))),
    }
}

fn counters_dict<'py>(py: Python<'py>, c: &core::OpCounters) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("tile_ops", c.tile_ops)?;
    d.set_item("loads", c.loads)?;
    d.set_item("stores", c.stores)?;
    d.set_item("iterations", c.iterations)?;
    d.set_item("wall_time", c.wall_time)?;
    Ok(d)
}

/// Dense row-major matrix tagged with a precision mode.
#[pyclass(name = "Matrix", module = "semiring_mxu", from_py_object)]
#[derive(Clone)]
struct PyMatrix {
    inner: core::MatrixBuffer,
}

#[pymethods]
impl PyMatrix {
    #[new]
    #[pyo3(signature = (rows, precision = "exact32"))]
    fn new(rows: Vec<Vec<f32>>, precision: &str) -> PyResult<Self> {
        let inner = core::MatrixBuffer::from_rows(&rows, mode(precision)?).py()?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (rows, cols, value, precision = "exact32"))]
    fn filled(rows: usize, cols: usize, value: f32, precision: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::MatrixBuffer::filled(rows, cols, value, mode(precision)?),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (path, precision = "exact32"))]
    fn load(path: &str, precision: &str) -> PyResult<Self> {
        let inner = core::io::parse_dense_matrix(path, mode(precision)?).py()?;
        Ok(Self { inner })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        core::io::write_dense_matrix(path, &self.inner).py()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    #[getter]
    fn precision(&self) -> &'static str {
        self.inner.mode().name()
    }

    fn get(&self, row: usize, col: usize) -> PyResult<f32> {
        let (r, c) = self.inner.shape();
        if row >= r || col >= c {
            return Err(SemiringError::new_err(format!("({row}, {col}) outside {r}x{c}")));
        }
        Ok(self.inner.get(row, col))
    }

    fn tolist(&self) -> Vec<Vec<f32>> {
        self.inner.to_rows()
    }

    fn max_abs_diff(&self, other: &PyMatrix) -> PyResult<f64> {
        self.inner.max_abs_diff(&other.inner).py()
    }

    fn __eq__(&self, other: &PyMatrix) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let (r, c) = self.inner.shape();
        format!("Matrix({r}x{c}, {})", self.inner.mode())
    }
}

/// Weighted graph; undirected graphs store each edge once.
#[pyclass(name = "Graph", module = "semiring_mxu", from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: core::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges = Vec::new(), directed = true))]
    fn new(n: usize, edges: Vec<(usize, usize, f32)>, directed: bool) -> PyResult<Self> {
        Ok(Self {
            inner: core::Graph::from_edges(n, directed, edges).py()?,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::io::parse_edge_list(path).py()?,
        })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: core::io::parse_edge_list_str(text).py()?,
        })
    }

    #[pyo3(signature = (u, v, w = 1.0))]
    fn add_edge(&mut self, u: usize, v: usize, w: f32) -> PyResult<()> {
        self.inner.add_edge(u, v, w).py()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn directed(&self) -> bool {
        self.inner.is_directed()
    }

    fn edges(&self) -> Vec<(usize, usize, f32)> {
        self.inner.edges().iter().map(|e| (e.u, e.v, e.w)).collect()
    }

    fn is_dag(&self) -> bool {
        self.inner.is_dag()
    }

    fn to_edge_list(&self) -> String {
        core::io::format_edge_list(&self.inner)
    }

    #[pyo3(signature = (op, precision = "exact32"))]
    fn encode(&self, op: &str, precision: &str) -> PyResult<PyMatrix> {
        let inner = core::encode(&self.inner, self::op(op)?, mode(precision)?).py()?;
        Ok(PyMatrix { inner })
    }

    fn __repr__(&self) -> String {
        let kind = if self.inner.is_directed() {
            "directed"
        } else {
            "undirected"
        };
        format!(
            "Graph(n={}, edges={}, {kind})",
            self.inner.n(),
            self.inner.edges().len()
        )
    }
}

/// Closure matrix plus iteration and operation counts.
#[pyclass(name = "ClosureResult", module = "semiring_mxu", skip_from_py_object)]
struct PyClosureResult {
    #[pyo3(get)]
    matrix: PyMatrix,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    converged: bool,
    counters: core::OpCounters,
}

#[pymethods]
impl PyClosureResult {
    #[getter]
    fn counters<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        counters_dict(py, &self.counters)
    }

    fn __repr__(&self) -> String {
        format!(
            "ClosureResult(iterations={}, converged={})",
            self.iterations, self.converged
        )
    }
}

impl From<core::ClosureResult> for PyClosureResult {
    fn from(r: core::ClosureResult) -> Self {
        Self {
            matrix: PyMatrix { inner: r.matrix },
            iterations: r.iterations,
            converged: r.converged,
            counters: r.counters,
        }
    }
}

fn options(
    scheme_name: &str,
    precision: &str,
    max_iter: Option<usize>,
    convergence_check: bool,
) -> PyResult<core::SolverOptions> {
    Ok(core::SolverOptions {
        scheme: scheme(scheme_name)?,
        mode: mode(precision)?,
        max_iter,
        convergence_check,
        mmo: core::MmoConfig::default(),
    })
}

/// Rounds to the nearest binary16 value (ties to even) and widens back.
#[pyfunction]
fn round_to_half(x: f32) -> f32 {
    core::round_to_half(x)
}

#[pyfunction]
fn ops() -> Vec<&'static str> {
    SemiringOp::ALL.iter().map(|o| o.name()).collect()
}

#[pyfunction]
fn oplus(op: &str, a: f32, b: f32) -> PyResult<f32> {
    core::scalar_oplus(self::op(op)?, a, b).py()
}

#[pyfunction]
#[pyo3(signature = (op, a, b, precision = "exact32"))]
fn otimes(op: &str, a: f32, b: f32, precision: &str) -> PyResult<f32> {
    core::scalar_otimes(self::op(op)?, a, b, mode(precision)?).py()
}

/// `(oplus_identity, pad_a, pad_b)`.
#[pyfunction]
fn identity_and_padding(op: &str) -> PyResult<(f32, f32, f32)> {
    let p = self::op(op)?.identity_and_padding();
    Ok((p.oplus_identity, p.pad_a, p.pad_b))
}

/// `D = C ⊕ (A ⊗ B)` on 16×16 tiles. Returns `(D, counters)`.
#[pyfunction]
fn mmo<'py>(
    py: Python<'py>,
    op: &str,
    a: &PyMatrix,
    b: &PyMatrix,
    c: &PyMatrix,
) -> PyResult<(PyMatrix, Bound<'py, PyDict>)> {
    let op = self::op(op)?;
    let mut ctr = core::OpCounters::new();
    let d = py
        .detach(|| core::mmo(op, &a.inner, &b.inner, &c.inner, &mut ctr))
        .py()?;
    Ok((PyMatrix { inner: d }, counters_dict(py, &ctr)?))
}

#[pyfunction]
fn mmo_reference(op: &str, a: &PyMatrix, b: &PyMatrix, c: &PyMatrix) -> PyResult<PyMatrix> {
    let inner = core::mmo_reference(self::op(op)?, &a.inner, &b.inner, &c.inner).py()?;
    Ok(PyMatrix { inner })
}

#[pyfunction]
#[pyo3(signature = (op, w, scheme = "leyzorek", max_iter = None, convergence_check = true))]
fn closure(
    op: &str,
    w: &PyMatrix,
    scheme: &str,
    max_iter: Option<usize>,
    convergence_check: bool,
) -> PyResult<PyClosureResult> {
    let opts = options(scheme, w.inner.mode().name(), max_iter, convergence_check)?;
    Ok(core::closure(self::op(op)?, &w.inner, &opts).py()?.into())
}

macro_rules! graph_solver {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[pyfunction]
        #[pyo3(signature = (graph, scheme = "leyzorek", precision = "exact32", max_iter = None, convergence_check = true))]
        fn $name(
            py: Python<'_>,
            graph: &PyGraph,
            scheme: &str,
            precision: &str,
            max_iter: Option<usize>,
            convergence_check: bool,
        ) -> PyResult<PyClosureResult> {
            let opts = options(scheme, precision, max_iter, convergence_check)?;
            Ok(py.detach(|| core::$name(&graph.inner, &opts)).py()?.into())
        }
    };
}

graph_solver!(apsp, "All-pairs shortest paths (min-plus).");
graph_solver!(aplp, "All-pairs longest paths on a DAG (max-plus).");
graph_solver!(max_capacity, "Widest-path capacities (max-min).");
graph_solver!(max_reliability, "Most reliable paths (max-mul).");
graph_solver!(min_reliability, "Least reliable paths (min-mul).");
graph_solver!(transitive_closure, "Reflexive transitive closure (or-and).");

type Forest = (f64, Vec<(usize, usize, f32)>);

/// Minimax distances and, when weights are distinct, the minimum spanning
/// forest as `(weight, [(u, v, w), ...])`.
#[pyfunction]
#[pyo3(signature = (graph, scheme = "leyzorek", precision = "exact32"))]
fn mst_bottleneck(
    graph: &PyGraph,
    scheme: &str,
    precision: &str,
) -> PyResult<(PyClosureResult, Option<Forest>)> {
    let r = core::mst_bottleneck(&graph.inner, &options(scheme, precision, None, true)?).py()?;
    let forest = r
        .forest
        .map(|f| (f.weight, f.edges.iter().map(|e| (e.u, e.v, e.w)).collect()));
    Ok((r.closure.into(), forest))
}

/// Squared distances and the `k` nearest reference indices per query.
#[pyfunction]
fn knn(points: &PyMatrix, refs: &PyMatrix, k: usize) -> PyResult<(PyMatrix, Vec<Vec<usize>>)> {
    let r = core::knn(&points.inner, &refs.inner, k, core::MmoConfig::default()).py()?;
    Ok((PyMatrix { inner: r.dist2 }, r.indices))
}

#[pyfunction]
fn floyd_warshall(op: &str, w: &PyMatrix) -> PyResult<PyMatrix> {
    Ok(PyMatrix {
        inner: core::oracles::generalized_floyd_warshall(self::op(op)?, &w.inner),
    })
}

#[pyfunction]
fn kruskal_bottleneck(graph: &PyGraph) -> (f64, PyMatrix) {
    let k = core::oracles::kruskal_bottleneck(&graph.inner);
    (k.msf_weight, PyMatrix { inner: k.bottleneck })
}

#[pyfunction]
#[pyo3(signature = (kind, n, density = 0.3, weights = "int:1:10", seed = 0, directed = true, connected = false, precision = "exact32"))]
#[allow(clippy::too_many_arguments)]
fn generate_graph(
    kind: &str,
    n: usize,
    density: f64,
    weights: &str,
    seed: u64,
    directed: bool,
    connected: bool,
    precision: &str,
) -> PyResult<PyGraph> {
    let spec = core::generate::GraphSpec {
        kind: kind.parse().py()?,
        n,
        density,
        weights: weights.parse().py()?,
        seed,
        directed,
        connected,
        precision: mode(precision)?,
    };
    Ok(PyGraph {
        inner: core::generate::generate_graph(&spec).py()?,
    })
}

/// Runs one graph problem end to end and returns the JSON run report.
#[pyfunction]
#[pyo3(signature = (problem, graph, algo = "leyzorek", precision = "exact32", validate = false))]
fn solve(
    py: Python<'_>,
    problem: &str,
    graph: &PyGraph,
    algo: &str,
    precision: &str,
    validate: bool,
) -> PyResult<String> {
    let problem: core::Problem = problem.parse().py()?;
    let req = core::solve::SolveRequest {
        algorithm: algo.parse().py()?,
        precision: mode(precision)?,
        validate,
        ..Default::default()
    };
    let input = core::solve::ProblemInput::Graph(graph.inner.clone());
    let out = py.detach(|| core::solve::solve(problem, &input, &req)).py()?;
    Ok(out.report.to_json())
}

#[pymodule]
#[pyo3(name = "semiring_mxu")]
pub fn semiring_mxu_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("SemiringError", py.get_type::<SemiringError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("NonConvergenceError", py.get_type::<NonConvergenceError>())?;
    m.add("DagRequiredError", py.get_type::<DagRequiredError>())?;
    m.add("TILE_DIM", core::TILE_DIM)?;
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyClosureResult>()?;
    m.add_function(wrap_pyfunction!(round_to_half, m)?)?;
    m.add_function(wrap_pyfunction!(ops, m)?)?;
    m.add_function(wrap_pyfunction!(oplus, m)?)?;
    m.add_function(wrap_pyfunction!(otimes, m)?)?;
    m.add_function(wrap_pyfunction!(identity_and_padding, m)?)?;
    m.add_function(wrap_pyfunction!(mmo, m)?)?;
    m.add_function(wrap_pyfunction!(mmo_reference, m)?)?;
    m.add_function(wrap_pyfunction!(closure, m)?)?;
    m.add_function(wrap_pyfunction!(apsp, m)?)?;
    m.add_function(wrap_pyfunction!(aplp, m)?)?;
    m.add_function(wrap_pyfunction!(max_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(max_reliability, m)?)?;
    m.add_function(wrap_pyfunction!(min_reliability, m)?)?;
    m.add_function(wrap_pyfunction!(transitive_closure, m)?)?;
    m.add_function(wrap_pyfunction!(mst_bottleneck, m)?)?;
    m.add_function(wrap_pyfunction!(knn, m)?)?;
    m.add_function(wrap_pyfunction!(floyd_warshall, m)?)?;
    m.add_function(wrap_pyfunction!(kruskal_bottleneck, m)?)?;
    m.add_function(wrap_pyfunction!(generate_graph, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    Ok(())
}
