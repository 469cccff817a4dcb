//! Classical references for validating the solvers. Everything here works in
//! f64 scalar arithmetic and shares no code with the tiled engine; results are
//! rounded to f32 only at the end.

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::matrix::MatrixBuffer;
use crate::semiring::{PrecisionMode, SemiringOp};

fn combine(op: SemiringOp, a: f64, b: f64) -> f64 {
    match op {
        SemiringOp::MinPlus | SemiringOp::MaxPlus => a + b,
        SemiringOp::MinMul | SemiringOp::MaxMul | SemiringOp::PlusMul => a * b,
        SemiringOp::MinMax => {
            if a >= b {
                a
            } else {
                b
            }
        }
        SemiringOp::MaxMin => {
            if a <= b {
                a
            } else {
                b
            }
        }
        SemiringOp::OrAnd => f64::from(u8::from(a != 0.0 && b != 0.0)),
        SemiringOp::AddNorm => (a - b) * (a - b),
    }
}

/// Whether `cand` should replace `cur` under the op's reduction.
fn improves(op: SemiringOp, cand: f64, cur: f64) -> bool {
    match op {
        SemiringOp::MinPlus | SemiringOp::MinMul | SemiringOp::MinMax => cand < cur,
        SemiringOp::MaxPlus | SemiringOp::MaxMul | SemiringOp::MaxMin => cand > cur,
        SemiringOp::OrAnd => cand != 0.0 && cur == 0.0,
        SemiringOp::PlusMul | SemiringOp::AddNorm => false,
    }
}

/// Floyd-Warshall with the op's reduction and combine, `k` outermost.
pub fn generalized_floyd_warshall(op: SemiringOp, w: &MatrixBuffer) -> MatrixBuffer {
    let n = w.rows();
    let mut d: Vec<f64> = w.as_slice().iter().map(|&x| f64::from(x)).collect();
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            for j in 0..n {
                let cand = combine(op, dik, d[k * n + j]);
                if improves(op, cand, d[i * n + j]) {
                    d[i * n + j] = cand;
                }
            }
        }
    }
    MatrixBuffer::from_vec(n, n, d.into_iter().map(|x| x as f32).collect(), w.mode()).expect("square matrix")
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KruskalResult {
    pub msf_weight: f64,
    pub msf_edges: Vec<Edge>,
    /// Heaviest edge on the forest path between each pair; `+∞` across
    /// components and `−∞` on the diagonal.
    pub bottleneck: MatrixBuffer,
}

/// Kruskal's minimum spanning forest (edges taken as undirected) plus the
/// max-edge-on-tree-path matrix.
pub fn kruskal_bottleneck(g: &Graph) -> KruskalResult {
    let n = g.n();
    let mut edges: Vec<Edge> = g.edges().iter().copied().filter(|e| e.u != e.v).collect();
    edges.sort_by(|a, b| a.w.total_cmp(&b.w));
    let mut dsu = DisjointSet::new(n);
    let mut tree: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut msf_edges = Vec::new();
    for e in edges {
        if dsu.union(e.u, e.v) {
            tree[e.u].push((e.v, f64::from(e.w)));
            tree[e.v].push((e.u, f64::from(e.w)));
            msf_edges.push(e);
        }
    }
    let msf_weight = msf_edges.iter().map(|e| f64::from(e.w)).sum();

    let mut bottleneck = MatrixBuffer::filled(n, n, f32::INFINITY, PrecisionMode::Exact32);
    for s in 0..n {
        bottleneck.set(s, s, f32::NEG_INFINITY);
        let mut stack = vec![(s, usize::MAX, f64::NEG_INFINITY)];
        while let Some((u, parent, heaviest)) = stack.pop() {
            for &(v, w) in &tree[u] {
                if v != parent {
                    let h = heaviest.max(w);
                    bottleneck.set(s, v, h as f32);
                    stack.push((v, u, h));
                }
            }
        }
    }
    KruskalResult {
        msf_weight,
        msf_edges,
        bottleneck,
    }
}

/// Reachability by depth-first search from every vertex; reflexive.
pub fn dfs_reachability(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.u].push(e.v);
        if !g.is_directed() {
            adj[e.v].push(e.u);
        }
    }
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Squared distances by a direct double loop, and the `k` nearest references
/// per query ordered by distance then index.
pub fn brute_force_knn(
    points: &MatrixBuffer,
    refs: &MatrixBuffer,
    k: usize,
) -> Result<(MatrixBuffer, Vec<Vec<usize>>)> {
    let (q, d) = points.shape();
    let (r, d2) = refs.shape();
    if d != d2 {
        return Err(Error::Shape(format!(
            "points have dimension {d}, references {d2}"
        )));
    }
    if k == 0 || k > r {
        return Err(Error::Shape(format!("k = {k} outside 1..={r}")));
    }
    let mut dist = vec![0.0f64; q * r];
    for i in 0..q {
        for j in 0..r {
            dist[i * r + j] = points
                .row(i)
                .iter()
                .zip(refs.row(j))
                .map(|(&a, &b)| {
                    let diff = f64::from(a) - f64::from(b);
                    diff * diff
                })
                .sum();
        }
    }
    let indices = (0..q)
        .map(|i| {
            let row = &dist[i * r..(i + 1) * r];
            let mut idx: Vec<usize> = (0..r).collect();
            idx.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
            idx.truncate(k);
            idx
        })
        .collect();
    let dist2 = MatrixBuffer::from_vec(q, r, dist.into_iter().map(|x| x as f32).collect(), points.mode())?;
    Ok((dist2, indices))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::encode;

    const E: PrecisionMode = PrecisionMode::Exact32;

    #[test]
    fn floyd_warshall_examples() {
        let g = Graph::from_edges(3, true, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 5.0)]).unwrap();
        let d = generalized_floyd_warshall(SemiringOp::MinPlus, &encode(&g, SemiringOp::MinPlus, E).unwrap());
        assert_eq!(d.get(0, 2), 3.0);

        let tri = Graph::from_edges(3, false, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        let d = generalized_floyd_warshall(SemiringOp::MinMax, &encode(&tri, SemiringOp::MinMax, E).unwrap());
        // paths 0-2: direct (max 3) or via 1 (max 2)
        assert_eq!(d.get(0, 2), 2.0);

        let rel = Graph::from_edges(3, true, [(0, 1, 0.9), (1, 2, 0.9), (0, 2, 0.5)]).unwrap();
        let d = generalized_floyd_warshall(SemiringOp::MaxMul, &encode(&rel, SemiringOp::MaxMul, E).unwrap());
        assert_eq!(d.get(0, 2), (f64::from(0.9f32) * f64::from(0.9f32)) as f32);
        assert!((d.get(0, 2) - 0.81).abs() < 1e-6);
    }

    #[test]
    fn kruskal_examples() {
        let tri = Graph::from_edges(3, false, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        let k = kruskal_bottleneck(&tri);
        assert_eq!(k.msf_weight, 3.0);
        assert_eq!(k.msf_edges.len(), 2);

        let two = Graph::from_edges(4, false, [(0, 1, 1.0), (2, 3, 2.0)]).unwrap();
        let k = kruskal_bottleneck(&two);
        assert_eq!(k.bottleneck.get(0, 2), f32::INFINITY);
        assert_eq!(k.bottleneck.get(3, 2), 2.0);

        let star = Graph::from_edges(4, false, [(0, 1, 4.0), (0, 2, 9.0), (0, 3, 6.0)]).unwrap();
        let k = kruskal_bottleneck(&star);
        assert_eq!(k.bottleneck.get(1, 3), 6.0);
        assert_eq!(k.bottleneck.get(1, 2), 9.0);
        assert_eq!(k.bottleneck.get(3, 1), 6.0);
        assert_eq!(k.bottleneck.get(2, 2), f32::NEG_INFINITY);
    }

    #[test]
    fn reachability_examples() {
        let cyc = Graph::from_edges(3, true, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        assert!(dfs_reachability(&cyc).iter().flatten().all(|&b| b));
        let chain = Graph::from_edges(3, true, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let r = dfs_reachability(&chain);
        for (i, row) in r.iter().enumerate() {
            for (j, &reach) in row.iter().enumerate() {
                assert_eq!(reach, j >= i);
            }
        }
        let r = dfs_reachability(&Graph::new(3, true));
        for (i, row) in r.iter().enumerate() {
            for (j, &reach) in row.iter().enumerate() {
                assert_eq!(reach, i == j);
            }
        }
    }

    #[test]
    fn knn_examples() {
        let points = MatrixBuffer::from_rows(&[[0.9, 0.0]], E).unwrap();
        let refs = MatrixBuffer::from_rows(&[[0.0, 0.0], [1.0, 0.0], [5.0, 0.0]], E).unwrap();
        let (d, idx) = brute_force_knn(&points, &refs, 1).unwrap();
        assert_eq!(idx, vec![vec![1]]);
        assert!((d.get(0, 1) - 0.01).abs() < 1e-6);
        let (_, idx) = brute_force_knn(&refs, &refs, 1).unwrap();
        assert_eq!(idx, vec![vec![0], vec![1], vec![2]]);
        let (_, idx) = brute_force_knn(&points, &refs, 3).unwrap();
        assert_eq!(idx, vec![vec![1, 0, 2]]);
        assert!(brute_force_knn(&points, &MatrixBuffer::zeros(1, 3, E), 1).is_err());
    }
}
