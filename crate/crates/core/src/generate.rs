//! Seeded synthetic graphs and point sets.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::MatrixBuffer;
use crate::semiring::PrecisionMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    ErdosRenyi,
    Path,
    Cycle,
    Grid,
    DagLayered,
}

impl GraphKind {
    pub const ALL: [GraphKind; 5] = [
        GraphKind::ErdosRenyi,
        GraphKind::Path,
        GraphKind::Cycle,
        GraphKind::Grid,
        GraphKind::DagLayered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GraphKind::ErdosRenyi => "erdos_renyi",
            GraphKind::Path => "path",
            GraphKind::Cycle => "cycle",
            GraphKind::Grid => "grid",
            GraphKind::DagLayered => "dag_layered",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GraphKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown graph kind '{s}'")))
    }
}

/// How edge weights (or point coordinates) are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightDist {
    /// Uniform reals in `[lo, hi)`.
    Uniform { lo: f32, hi: f32 },
    /// Uniform integers in `[lo, hi]`.
    Integer { lo: i32, hi: i32 },
    /// `2^-e` with `e` uniform in `0..=max_exp`; products stay exact.
    PowerOfTwo { max_exp: u32 },
    /// A shuffled `1..=E` so every edge weight is distinct.
    Distinct,
}

impl Default for WeightDist {
    fn default() -> Self {
        WeightDist::Integer { lo: 1, hi: 10 }
    }
}

impl WeightDist {
    fn validate(self) -> Result<()> {
        let ok = match self {
            WeightDist::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            WeightDist::Integer { lo, hi } => lo <= hi,
            WeightDist::PowerOfTwo { max_exp } => max_exp <= 126,
            WeightDist::Distinct => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid weight distribution {self}")))
        }
    }

    fn draw(self, rng: &mut ChaCha8Rng) -> f32 {
        match self {
            WeightDist::Uniform { lo, hi } => rng.gen_range(lo..hi),
            WeightDist::Integer { lo, hi } => rng.gen_range(lo..=hi) as f32,
            WeightDist::PowerOfTwo { max_exp } => 2f32.powi(-(rng.gen_range(0..=max_exp) as i32)),
            WeightDist::Distinct => 1.0,
        }
    }
}

impl fmt::Display for WeightDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightDist::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            WeightDist::Integer { lo, hi } => write!(f, "int:{lo}:{hi}"),
            WeightDist::PowerOfTwo { max_exp } => write!(f, "pow2:{max_exp}"),
            WeightDist::Distinct => f.write_str("distinct"),
        }
    }
}

impl FromStr for WeightDist {
    type Err = Error;

    /// `uniform:LO:HI`, `int:LO:HI`, `pow2:MAXEXP` or `distinct`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad weight spec '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        let dist = match parts.as_slice() {
            ["uniform", lo, hi] => WeightDist::Uniform {
                lo: lo.parse().map_err(|_| bad())?,
                hi: hi.parse().map_err(|_| bad())?,
            },
            ["int", lo, hi] => WeightDist::Integer {
                lo: lo.parse().map_err(|_| bad())?,
                hi: hi.parse().map_err(|_| bad())?,
            },
            ["pow2", e] => WeightDist::PowerOfTwo {
                max_exp: e.parse().map_err(|_| bad())?,
            },
            ["distinct"] => WeightDist::Distinct,
            _ => return Err(bad()),
        };
        dist.validate()?;
        Ok(dist)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphSpec {
    pub kind: GraphKind,
    pub n: usize,
    /// Edge probability for `erdos_renyi` and `dag_layered`.
    pub density: f64,
    pub weights: WeightDist,
    pub seed: u64,
    pub directed: bool,
    /// Adds a random spanning tree (`erdos_renyi`) or a predecessor for every
    /// vertex past the first layer (`dag_layered`).
    pub connected: bool,
    /// Weights are rounded to half precision under `Mixed16`.
    pub precision: PrecisionMode,
}

impl GraphSpec {
    pub fn new(kind: GraphKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            density: 0.3,
            weights: WeightDist::default(),
            seed,
            directed: true,
            connected: false,
            precision: PrecisionMode::Exact32,
        }
    }
}

/// Collects simple edges (no self-loops, no repeats; undirected pairs are
/// unordered) in insertion order.
struct EdgeSet {
    directed: bool,
    seen: HashSet<(usize, usize)>,
    order: Vec<(usize, usize)>,
}

impl EdgeSet {
    fn new(directed: bool) -> Self {
        Self {
            directed,
            seen: HashSet::new(),
            order: Vec::new(),
        }
    }

    fn insert(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        let key = if self.directed {
            (u, v)
        } else {
            (u.min(v), u.max(v))
        };
        if self.seen.insert(key) {
            self.order.push((u, v));
        }
    }
}

pub fn generate_graph(spec: &GraphSpec) -> Result<Graph> {
    if !(0.0..=1.0).contains(&spec.density) {
        return Err(Error::Config(format!("density {} outside [0, 1]", spec.density)));
    }
    spec.weights.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut set = EdgeSet::new(spec.directed);

    match spec.kind {
        GraphKind::ErdosRenyi => {
            if spec.connected && n > 1 {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng);
                for i in 1..n {
                    let parent = perm[rng.gen_range(0..i)];
                    set.insert(parent, perm[i]);
                }
            }
            for u in 0..n {
                let lo = if spec.directed { 0 } else { u + 1 };
                for v in lo..n {
                    if u != v && rng.gen_bool(spec.density) {
                        set.insert(u, v);
                    }
                }
            }
        }
        GraphKind::Path => (1..n).for_each(|i| set.insert(i - 1, i)),
        GraphKind::Cycle => {
            (1..n).for_each(|i| set.insert(i - 1, i));
            if n > 1 {
                set.insert(n - 1, 0);
            }
        }
        GraphKind::Grid => {
            let cols = (n as f64).sqrt().ceil().max(1.0) as usize;
            for i in 0..n {
                if (i + 1) % cols != 0 && i + 1 < n {
                    set.insert(i, i + 1);
                }
                if i + cols < n {
                    set.insert(i, i + cols);
                }
            }
        }
        GraphKind::DagLayered => {
            let width = ((n as f64).sqrt().round() as usize).max(1);
            let layer = |v: usize| v / width;
            for u in 0..n {
                for v in u + 1..n {
                    if layer(v) == layer(u) + 1 && rng.gen_bool(spec.density) {
                        set.insert(u, v);
                    }
                }
            }
            if spec.connected {
                for v in width..n {
                    let start = (layer(v) - 1) * width;
                    let u = rng.gen_range(start..start + width);
                    set.insert(u, v);
                }
            }
        }
    }

    let mut weights: Vec<f32> = match spec.weights {
        WeightDist::Distinct => (1..=set.order.len()).map(|w| w as f32).collect(),
        dist => (0..set.order.len()).map(|_| dist.draw(&mut rng)).collect(),
    };
    if spec.weights == WeightDist::Distinct {
        weights.shuffle(&mut rng);
    }
    let mut g = Graph::new(n, spec.directed);
    for (&(u, v), w) in set.order.iter().zip(weights) {
        g.add_edge(u, v, spec.precision.quantize(w))?;
    }
    Ok(g)
}

/// `rows × cols` matrix of coordinates drawn from `dist`.
pub fn generate_points(
    rows: usize,
    cols: usize,
    dist: WeightDist,
    seed: u64,
    mode: PrecisionMode,
) -> Result<MatrixBuffer> {
    dist.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = match dist {
        WeightDist::Distinct => {
            let mut v: Vec<f32> = (1..=rows * cols).map(|x| x as f32).collect();
            v.shuffle(&mut rng);
            v
        }
        _ => (0..rows * cols)
            .map(|_| mode.quantize(dist.draw(&mut rng)))
            .collect(),
    };
    MatrixBuffer::from_vec(rows, cols, data, mode)
}
