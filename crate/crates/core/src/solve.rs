//! End-to-end problem runs: solve, optionally validate against the oracles,
//! and summarize as a [`RunReport`].

use std::time::Instant;

use crate::closure::{self, ClosureResult, SolverOptions, SpanningForest};
use crate::error::{Error, Result};
use crate::graph::{encode, Graph};
use crate::matrix::{MatrixBuffer, OpCounters};
use crate::mmo::MmoConfig;
use crate::oracles;
use crate::report::{Algorithm, Problem, RunReport, Validation};
use crate::semiring::{PrecisionMode, SemiringOp};

/// Relative tolerance on KNN squared distances.
pub const KNN_REL_TOL: f64 = 1e-5;

pub enum ProblemInput {
    Graph(Graph),
    Points {
        points: MatrixBuffer,
        refs: MatrixBuffer,
        k: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveRequest {
    pub algorithm: Algorithm,
    pub precision: PrecisionMode,
    pub validate: bool,
    pub max_iter: Option<usize>,
    pub convergence_check: bool,
    pub mmo: MmoConfig,
}

impl Default for SolveRequest {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Leyzorek,
            precision: PrecisionMode::Exact32,
            validate: false,
            max_iter: None,
            convergence_check: true,
            mmo: MmoConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub report: RunReport,
    pub matrix: MatrixBuffer,
    pub indices: Option<Vec<Vec<usize>>>,
    pub forest: Option<SpanningForest>,
}

/// Spacing of binary16 values around `x` (`+∞` past the half range).
pub fn half_quantum(x: f64) -> f64 {
    let x = x.abs();
    if x > 65504.0 {
        f64::INFINITY
    } else if x < 2f64.powi(-14) {
        2f64.powi(-24)
    } else {
        2f64.powi(x.log2().floor() as i32 - 10)
    }
}

/// Mixed16 acceptance bound: twice the half quantum of the largest finite
/// magnitude in the reference.
pub fn mixed16_tolerance(reference: &MatrixBuffer) -> f64 {
    let largest = reference
        .as_slice()
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |acc, &v| acc.max(f64::from(v).abs()));
    2.0 * half_quantum(largest)
}

fn graph_oracle(problem: Problem, g: &Graph) -> Result<MatrixBuffer> {
    let op = problem.op();
    Ok(match problem {
        Problem::Mst => oracles::kruskal_bottleneck(g).bottleneck,
        Problem::Gtc => {
            let reach = oracles::dfs_reachability(g);
            let data = reach.iter().flatten().map(|&r| f32::from(u8::from(r))).collect();
            MatrixBuffer::from_vec(g.n(), g.n(), data, PrecisionMode::Exact32)?
        }
        Problem::Aplp if !g.is_dag() => return Err(Error::DagRequired),
        Problem::Knn => return Err(Error::Config("knn takes point sets, not a graph".into())),
        _ => oracles::generalized_floyd_warshall(op, &encode(g, op, PrecisionMode::Exact32)?),
    })
}

fn run_closure(
    problem: Problem,
    g: &Graph,
    opts: &SolverOptions,
) -> Result<(ClosureResult, Option<SpanningForest>)> {
    Ok(match problem {
        Problem::Apsp => (closure::apsp(g, opts)?, None),
        Problem::Aplp => (closure::aplp(g, opts)?, None),
        Problem::Mcp => (closure::max_capacity(g, opts)?, None),
        Problem::Maxrp => (closure::max_reliability(g, opts)?, None),
        Problem::Minrp => (closure::min_reliability(g, opts)?, None),
        Problem::Gtc => (closure::transitive_closure(g, opts)?, None),
        Problem::Mst => {
            let r = closure::mst_bottleneck(g, opts)?;
            (r.closure, r.forest)
        }
        Problem::Knn => return Err(Error::Config("knn takes point sets, not a graph".into())),
    })
}

fn compare(engine: &MatrixBuffer, reference: &MatrixBuffer, mode: PrecisionMode) -> Result<Validation> {
    let max_abs_diff = engine.max_abs_diff(reference)?;
    let matched = match mode {
        PrecisionMode::Exact32 => max_abs_diff == 0.0,
        PrecisionMode::Mixed16 => max_abs_diff <= mixed16_tolerance(reference),
    };
    Ok(Validation {
        matched,
        max_abs_diff,
    })
}

pub fn solve(problem: Problem, input: &ProblemInput, req: &SolveRequest) -> Result<SolveOutcome> {
    match (problem, input) {
        (Problem::Knn, ProblemInput::Points { points, refs, k }) => solve_knn(points, refs, *k, req),
        (Problem::Knn, ProblemInput::Graph(_)) => Err(Error::Config("knn needs point sets".into())),
        (_, ProblemInput::Graph(g)) => solve_graph(problem, g, req),
        (_, ProblemInput::Points { .. }) => Err(Error::Config(format!("{problem} needs a graph input"))),
    }
}

fn solve_graph(problem: Problem, g: &Graph, req: &SolveRequest) -> Result<SolveOutcome> {
    let mode = req.precision;
    // The oracle sees exactly the values the engine feeds into ⊗.
    let oracle_graph = || {
        let g = g.map_weights(|w| mode.quantize(w));
        if problem == Problem::Gtc {
            g.map_weights(|_| 1.0)
        } else {
            g
        }
    };

    let (matrix, counters, iterations, converged, forest) = match req.algorithm.scheme() {
        Some(scheme) => {
            let opts = SolverOptions {
                scheme,
                mode,
                max_iter: req.max_iter,
                convergence_check: req.convergence_check,
                mmo: req.mmo,
            };
            let (res, forest) = run_closure(problem, g, &opts)?;
            (res.matrix, res.counters, res.iterations, res.converged, forest)
        }
        None => {
            let start = Instant::now();
            let m = graph_oracle(problem, &oracle_graph())?;
            let counters = OpCounters {
                wall_time: start.elapsed().as_secs_f64(),
                ..OpCounters::default()
            };
            (m, counters, 0, true, None)
        }
    };

    let validation = if req.validate {
        let og = oracle_graph();
        let reference = graph_oracle(problem, &og)?;
        let mut v = compare(&matrix, &reference, mode)?;
        if let (Some(f), Problem::Mst) = (&forest, problem) {
            let k = oracles::kruskal_bottleneck(&og);
            let tol = match mode {
                PrecisionMode::Exact32 => 0.0,
                PrecisionMode::Mixed16 => mixed16_tolerance(&reference),
            };
            v.matched &= (f.weight - k.msf_weight).abs() <= tol && f.edges.len() == k.msf_edges.len();
        }
        Some(v)
    } else {
        None
    };

    let n = g.n();
    Ok(SolveOutcome {
        report: RunReport {
            problem,
            op: problem.op(),
            n,
            m: n,
            k: n,
            algorithm: req.algorithm,
            precision: mode,
            iterations: iterations as u64,
            tile_ops: counters.tile_ops,
            loads: counters.loads,
            stores: counters.stores,
            wall_time_seconds: counters.wall_time,
            converged,
            validation,
        },
        matrix,
        indices: None,
        forest,
    })
}

fn solve_knn(
    points: &MatrixBuffer,
    refs: &MatrixBuffer,
    k: usize,
    req: &SolveRequest,
) -> Result<SolveOutcome> {
    let mode = req.precision;
    let points = points.clone().with_mode(mode);
    let refs = refs.clone().with_mode(mode);
    let quantized = |m: &MatrixBuffer| m.map(|x| mode.quantize(x));

    let (dist2, indices, counters) = match req.algorithm {
        Algorithm::Oracle => {
            let start = Instant::now();
            let (d, idx) = oracles::brute_force_knn(&quantized(&points), &quantized(&refs), k)?;
            let counters = OpCounters {
                wall_time: start.elapsed().as_secs_f64(),
                ..OpCounters::default()
            };
            (d, idx, counters)
        }
        _ => {
            let r = closure::knn(&points, &refs, k, req.mmo)?;
            (r.dist2, r.indices, r.counters)
        }
    };

    let validation = if req.validate {
        let (ref_d, ref_idx) = oracles::brute_force_knn(&quantized(&points), &quantized(&refs), k)?;
        let max_abs_diff = dist2.max_abs_diff(&ref_d)?;
        let within = dist2.as_slice().iter().zip(ref_d.as_slice()).all(|(&a, &b)| {
            let (a, b) = (f64::from(a), f64::from(b));
            (a - b).abs() <= KNN_REL_TOL * b.abs() + f64::from(f32::MIN_POSITIVE)
        });
        Some(Validation {
            matched: within && indices == ref_idx,
            max_abs_diff,
        })
    } else {
        None
    };

    Ok(SolveOutcome {
        report: RunReport {
            problem: Problem::Knn,
            op: SemiringOp::AddNorm,
            n: refs.rows(),
            m: points.rows(),
            k: points.cols(),
            algorithm: req.algorithm,
            precision: mode,
            iterations: counters.iterations,
            tile_ops: counters.tile_ops,
            loads: counters.loads,
            stores: counters.stores,
            wall_time_seconds: counters.wall_time,
            converged: true,
            validation,
        },
        matrix: dist2,
        indices: Some(indices),
        forest: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_quantum_values() {
        assert_eq!(half_quantum(1.0), 2f64.powi(-10));
        assert_eq!(half_quantum(1.5), 2f64.powi(-10));
        assert_eq!(half_quantum(2048.0), 2.0);
        assert_eq!(half_quantum(100.0), 2f64.powi(-4));
        assert_eq!(half_quantum(0.0), 2f64.powi(-24));
        assert_eq!(half_quantum(1e6), f64::INFINITY);
    }

    #[test]
    fn validated_solves_match() {
        let g = Graph::from_edges(3, false, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        let req = SolveRequest {
            validate: true,
            ..SolveRequest::default()
        };
        for problem in [Problem::Apsp, Problem::Mcp, Problem::Mst, Problem::Gtc] {
            let out = solve(problem, &ProblemInput::Graph(g.clone()), &req).unwrap();
            assert!(out.report.validation.unwrap().matched, "{problem}");
        }
        let out = solve(Problem::Mst, &ProblemInput::Graph(g.clone()), &req).unwrap();
        assert_eq!(out.forest.unwrap().weight, 3.0);
    }

    #[test]
    fn oracle_algorithm_counts_nothing() {
        let g = Graph::from_edges(3, true, [(0, 1, 1.0), (1, 2, 2.0)]).unwrap();
        let req = SolveRequest {
            algorithm: Algorithm::Oracle,
            validate: true,
            ..SolveRequest::default()
        };
        let out = solve(Problem::Apsp, &ProblemInput::Graph(g), &req).unwrap();
        assert_eq!(out.report.tile_ops, 0);
        assert_eq!(out.matrix.get(0, 2), 3.0);
        assert!(out.report.validation.unwrap().matched);
    }

    #[test]
    fn input_kind_mismatch() {
        let g = Graph::new(2, true);
        assert!(solve(Problem::Knn, &ProblemInput::Graph(g), &SolveRequest::default()).is_err());
    }
}
