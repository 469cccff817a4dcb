use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::matrix::MatrixBuffer;
use crate::semiring::{PrecisionMode, SemiringOp};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f32,
}

/// Weighted graph on vertices `0..n`. Undirected graphs store each edge once.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    directed: bool,
}

impl Graph {
    pub fn new(n: usize, directed: bool) -> Self {
        Self {
            n,
            edges: Vec::new(),
            directed,
        }
    }

    pub fn from_edges(
        n: usize,
        directed: bool,
        edges: impl IntoIterator<Item = (usize, usize, f32)>,
    ) -> Result<Self> {
        let mut g = Self::new(n, directed);
        for (u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize, w: f32) -> Result<()> {
        for index in [u, v] {
            if index >= self.n {
                return Err(Error::Index {
                    line: 0,
                    index,
                    n: self.n,
                });
            }
        }
        if !w.is_finite() {
            return Err(Error::Config(format!("edge {u}->{v} has non-finite weight {w}")));
        }
        self.edges.push(Edge { u, v, w });
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Every directed arc: undirected edges yield both orientations.
    pub fn arcs(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().flat_map(move |&e| {
            let back = (!self.directed && e.u != e.v).then_some(Edge {
                u: e.v,
                v: e.u,
                w: e.w,
            });
            std::iter::once(e).chain(back)
        })
    }

    pub fn as_undirected(&self) -> Graph {
        Graph {
            directed: false,
            ..self.clone()
        }
    }

    pub fn map_weights(&self, f: impl Fn(f32) -> f32) -> Graph {
        Graph {
            edges: self.edges.iter().map(|e| Edge { w: f(e.w), ..*e }).collect(),
            ..self.clone()
        }
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in self.arcs() {
            adj[e.u].push(e.v);
        }
        adj
    }

    /// Kahn's algorithm over the arcs; self-loops and undirected edges are cycles.
    pub fn is_dag(&self) -> bool {
        let mut indeg = vec![0usize; self.n];
        let adj = self.adjacency();
        for targets in &adj {
            for &v in targets {
                indeg[v] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = queue.pop_front() {
            seen += 1;
            for &v in &adj[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        seen == self.n
    }

    /// Longest shortest-hop distance between reachable pairs (BFS per source).
    pub fn hop_diameter(&self) -> usize {
        let adj = self.adjacency();
        let mut best = 0;
        for s in 0..self.n {
            let mut dist = vec![usize::MAX; self.n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        best = best.max(dist[v]);
                        queue.push_back(v);
                    }
                }
            }
        }
        best
    }
}

/// Value on the diagonal: the ⊗-neutral weight of the empty path.
pub fn diagonal_value(op: SemiringOp) -> Result<f32> {
    Ok(match op {
        SemiringOp::MinPlus | SemiringOp::MaxPlus => 0.0,
        SemiringOp::MinMul | SemiringOp::MaxMul | SemiringOp::OrAnd => 1.0,
        SemiringOp::MinMax => f32::NEG_INFINITY,
        SemiringOp::MaxMin => f32::INFINITY,
        SemiringOp::PlusMul | SemiringOp::AddNorm => return Err(Error::NotClosureOp { op }),
    })
}

/// Adjacency matrix for `op`: edge weights where present (parallel edges
/// combined by ⊕), the ⊕-identity where absent, and the ⊗-neutral value on
/// the diagonal.
pub fn encode(g: &Graph, op: SemiringOp, mode: PrecisionMode) -> Result<MatrixBuffer> {
    let diag = diagonal_value(op)?;
    let mut w = MatrixBuffer::identity_pattern(g.n(), diag, op.oplus_identity(), mode);
    for e in g.arcs() {
        if matches!(op, SemiringOp::MinMul | SemiringOp::MaxMul) && !(0.0..=1.0).contains(&e.w) {
            return Err(Error::Domain {
                op,
                value: e.w,
                domain: "reliability in [0, 1]",
            });
        }
        op.check(e.w)?;
        let cur = w.get(e.u, e.v);
        w.set(e.u, e.v, op.oplus_raw(cur, e.w));
    }
    Ok(w)
}
