//! Iterated-mmo closure solvers and the graph applications built on them.
//!
//! Both schemes start from the encoded adjacency matrix `W` and repeat
//! `C ← C ⊕ (C ⊗ X)` until an iteration leaves `C` unchanged. All-pairs
//! Bellman-Ford uses `X = W` and needs up to `n` iterations; Leyzorek's
//! squaring uses `X = C` and needs at most `⌈log₂ n⌉` plus one confirming
//! pass.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{encode, Edge, Graph};
use crate::matrix::{MatrixBuffer, OpCounters};
use crate::mmo::{mmo_with, MmoConfig};
use crate::semiring::{PrecisionMode, SemiringOp};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureScheme {
    BellmanFord,
    #[default]
    Leyzorek,
}

impl ClosureScheme {
    /// Iteration cap when the convergence check is on.
    pub fn default_max_iter(self, n: usize) -> usize {
        match self {
            ClosureScheme::BellmanFord => n.max(1),
            ClosureScheme::Leyzorek => ceil_log2(n) + 1,
        }
    }

    /// [`Self::default_max_iter`] for a precision mode. Re-rounding partial
    /// sums to half lets the reduction keep picking slightly smaller values
    /// for a few extra rounds, so `Mixed16` gets twice the exact cap.
    pub fn default_max_iter_for(self, n: usize, mode: PrecisionMode) -> usize {
        match mode {
            PrecisionMode::Exact32 => self.default_max_iter(n),
            PrecisionMode::Mixed16 => 2 * self.default_max_iter(n),
        }
    }

    /// Worst-case iteration count used when the convergence check is off.
    pub fn fixed_iterations(self, n: usize) -> usize {
        match self {
            ClosureScheme::BellmanFord => n.saturating_sub(1).max(1),
            ClosureScheme::Leyzorek => ceil_log2(n).max(1),
        }
    }
}

pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    pub scheme: ClosureScheme,
    pub mode: PrecisionMode,
    /// Overrides the scheme's default iteration cap.
    pub max_iter: Option<usize>,
    /// Stop as soon as an iteration changes nothing. When off, the solver runs
    /// a fixed worst-case number of iterations and reports `converged = false`.
    pub convergence_check: bool,
    pub mmo: MmoConfig,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            scheme: ClosureScheme::default(),
            mode: PrecisionMode::Exact32,
            max_iter: None,
            convergence_check: true,
            mmo: MmoConfig::default(),
        }
    }
}

impl SolverOptions {
    pub fn with_scheme(scheme: ClosureScheme) -> Self {
        Self {
            scheme,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureResult {
    pub matrix: MatrixBuffer,
    pub iterations: usize,
    pub converged: bool,
    pub counters: OpCounters,
}

/// `true` when any cell differs. `Exact32` compares bit patterns; `Mixed16`
/// compares after rounding both sides to half precision.
pub fn check_convergence(curr: &MatrixBuffer, prev: &MatrixBuffer, mode: PrecisionMode) -> Result<bool> {
    if curr.shape() != prev.shape() {
        return Err(Error::Shape(format!(
            "cannot compare {:?} with {:?}",
            curr.shape(),
            prev.shape()
        )));
    }
    let changed = curr
        .as_slice()
        .iter()
        .zip(prev.as_slice())
        .any(|(&x, &y)| mode.quantize(x).to_bits() != mode.quantize(y).to_bits());
    Ok(changed)
}

pub fn closure(op: SemiringOp, w: &MatrixBuffer, opts: &SolverOptions) -> Result<ClosureResult> {
    if !op.is_closure_op() {
        return Err(Error::NotClosureOp { op });
    }
    let n = w.rows();
    if w.cols() != n {
        return Err(Error::Shape(format!(
            "closure needs a square matrix, got {:?}",
            w.shape()
        )));
    }
    let start = Instant::now();
    let mut counters = OpCounters::new();
    let mut c = w.clone();
    let mut iterations = 0;
    let mut converged = false;

    let cap = if opts.convergence_check {
        opts.max_iter
            .unwrap_or_else(|| opts.scheme.default_max_iter_for(n, w.mode()))
    } else {
        opts.max_iter.unwrap_or_else(|| opts.scheme.fixed_iterations(n))
    };

    while iterations < cap {
        let next = match opts.scheme {
            ClosureScheme::BellmanFord => mmo_with(op, &c, w, &c, &mut counters, opts.mmo)?,
            ClosureScheme::Leyzorek => mmo_with(op, &c, &c, &c, &mut counters, opts.mmo)?,
        };
        iterations += 1;
        let changed = opts.convergence_check && check_convergence(&next, &c, w.mode())?;
        c = next;
        if opts.convergence_check && !changed {
            converged = true;
            break;
        }
    }
    if opts.convergence_check && !converged {
        return Err(Error::NonConvergence { iterations });
    }

    counters.iterations = iterations as u64;
    counters.wall_time = start.elapsed().as_secs_f64();
    Ok(ClosureResult {
        matrix: c,
        iterations,
        converged,
        counters,
    })
}

pub fn closure_bellman_ford(
    op: SemiringOp,
    w: &MatrixBuffer,
    max_iter: Option<usize>,
) -> Result<ClosureResult> {
    let opts = SolverOptions {
        max_iter,
        ..SolverOptions::with_scheme(ClosureScheme::BellmanFord)
    };
    closure(op, w, &opts)
}

pub fn closure_leyzorek(op: SemiringOp, w: &MatrixBuffer, max_iter: Option<usize>) -> Result<ClosureResult> {
    let opts = SolverOptions {
        max_iter,
        ..SolverOptions::with_scheme(ClosureScheme::Leyzorek)
    };
    closure(op, w, &opts)
}

fn solve_graph(g: &Graph, op: SemiringOp, opts: &SolverOptions) -> Result<ClosureResult> {
    let w = encode(g, op, opts.mode)?;
    closure(op, &w, opts)
}

/// Shortest path lengths (min-plus).
pub fn apsp(g: &Graph, opts: &SolverOptions) -> Result<ClosureResult> {
    solve_graph(g, SemiringOp::MinPlus, opts)
}

/// Longest (critical) path lengths (max-plus); the graph must be acyclic.
pub fn aplp(g: &Graph, opts: &SolverOptions) -> Result<ClosureResult> {
    if !g.is_dag() {
        return Err(Error::DagRequired);
    }
    solve_graph(g, SemiringOp::MaxPlus, opts)
}

/// Bottleneck capacity of the widest path (max-min).
pub fn max_capacity(g: &Graph, opts: &SolverOptions) -> Result<ClosureResult> {
    solve_graph(g, SemiringOp::MaxMin, opts)
}

/// Most reliable path, weights in `[0, 1]` (max-mul).
pub fn max_reliability(g: &Graph, opts: &SolverOptions) -> Result<ClosureResult> {
    solve_graph(g, SemiringOp::MaxMul, opts)
}

/// Least reliable path, weights in `(0, 1]` (min-mul). Any cycle with product
/// below one has no fixpoint and surfaces as `NonConvergence`.
pub fn min_reliability(g: &Graph, opts: &SolverOptions) -> Result<ClosureResult> {
    solve_graph(g, SemiringOp::MinMul, opts)
}

/// Reflexive transitive closure (or-and). Every listed edge counts as present
/// regardless of its weight.
pub fn transitive_closure(g: &Graph, opts: &SolverOptions) -> Result<ClosureResult> {
    solve_graph(&g.map_weights(|_| 1.0), SemiringOp::OrAnd, opts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpanningForest {
    pub weight: f64,
    pub edges: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MstBottleneck {
    /// Min-max closure: minimax edge weight between every pair, `+∞` across
    /// components, `−∞` on the diagonal.
    pub closure: ClosureResult,
    /// `None` when edge weights are not pairwise distinct.
    pub forest: Option<SpanningForest>,
}

impl MstBottleneck {
    pub fn spanning_forest(&self) -> Result<&SpanningForest> {
        self.forest.as_ref().ok_or(Error::DistinctWeightsRequired)
    }
}

/// Minimax (bottleneck) distances and the minimum spanning forest. Edges are
/// treated as undirected. With distinct weights an edge belongs to the forest
/// exactly when its weight equals the bottleneck between its endpoints.
pub fn mst_bottleneck(g: &Graph, opts: &SolverOptions) -> Result<MstBottleneck> {
    let g = g.as_undirected();
    let closure = solve_graph(&g, SemiringOp::MinMax, opts)?;

    let candidates: Vec<Edge> = g
        .edges()
        .iter()
        .filter(|e| e.u != e.v)
        .map(|e| Edge {
            w: opts.mode.quantize(e.w),
            ..*e
        })
        .collect();
    let mut weights: Vec<u32> = candidates.iter().map(|e| e.w.to_bits()).collect();
    weights.sort_unstable();
    weights.dedup();
    let forest = (weights.len() == candidates.len()).then(|| {
        let edges: Vec<Edge> = candidates
            .into_iter()
            .filter(|e| closure.matrix.get(e.u, e.v) == e.w)
            .collect();
        SpanningForest {
            weight: edges.iter().map(|e| f64::from(e.w)).sum(),
            edges,
        }
    });
    Ok(MstBottleneck { closure, forest })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnnResult {
    /// Squared L2 distance from every query to every reference.
    pub dist2: MatrixBuffer,
    /// Per query, the `k` nearest references; ties go to the lower index.
    pub indices: Vec<Vec<usize>>,
    pub counters: OpCounters,
}

/// Brute-force k-nearest neighbours from one add-norm mmo:
/// `dist2 = 0 ⊕ (points ⊗ refsᵀ)`.
pub fn knn(points: &MatrixBuffer, refs: &MatrixBuffer, k: usize, config: MmoConfig) -> Result<KnnResult> {
    let (q, d) = points.shape();
    let (r, d2) = refs.shape();
    if d != d2 || d == 0 {
        return Err(Error::Shape(format!(
            "points have dimension {d}, references {d2}"
        )));
    }
    if k == 0 || k > r {
        return Err(Error::Shape(format!("k = {k} outside 1..={r}")));
    }
    let start = Instant::now();
    let mut counters = OpCounters::new();
    let zero = MatrixBuffer::zeros(q, r, points.mode());
    let dist2 = mmo_with(
        SemiringOp::AddNorm,
        points,
        &refs.transpose(),
        &zero,
        &mut counters,
        config,
    )?;
    let indices = (0..q).map(|i| k_smallest(dist2.row(i), k)).collect();
    counters.iterations = 1;
    counters.wall_time = start.elapsed().as_secs_f64();
    Ok(KnnResult {
        dist2,
        indices,
        counters,
    })
}

fn k_smallest(row: &[f32], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..row.len()).collect();
    idx.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}
