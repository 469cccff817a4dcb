//! Semiring-generalized matrix operations `D = C ⊕ (A ⊗ B)` on fixed 16×16
//! tiles, closure solvers for graph problems built on them, and independent
//! oracles for validation.
//!
//! ```
//! use semiring_mxu::{apsp, Graph, SolverOptions};
//!
//! let g = Graph::from_edges(3, true, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 5.0)]).unwrap();
//! let r = apsp(&g, &SolverOptions::default()).unwrap();
//! assert_eq!(r.matrix.get(0, 2), 3.0);
//! ```

pub mod cli;
pub mod closure;
pub mod error;
pub mod generate;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod mmo;
pub mod oracles;
pub mod report;
pub mod selftest;
pub mod semiring;
pub mod solve;
pub mod tile;

pub use closure::{
    aplp, apsp, check_convergence, closure, closure_bellman_ford, closure_leyzorek, knn, max_capacity,
    max_reliability, min_reliability, mst_bottleneck, transitive_closure, ClosureResult, ClosureScheme,
    KnnResult, MstBottleneck, SolverOptions, SpanningForest,
};
pub use error::{Error, Result};
pub use graph::{encode, Edge, Graph};
pub use matrix::{MatrixBuffer, OpCounters};
pub use mmo::{mmo, mmo_reference, mmo_with, tile_count, MmoConfig};
pub use report::{Algorithm, Problem, RunReport, Validation};
pub use semiring::{round_to_half, scalar_oplus, scalar_otimes, PrecisionMode, SemiringOp};
pub use tile::{tile_load, tile_mmo, tile_store, Tile, TileRole, TILE_DIM};
