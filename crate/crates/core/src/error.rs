use std::path::PathBuf;

use thiserror::Error;

use crate::semiring::SemiringOp;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} outside the domain of {op} ({domain})")]
    Domain {
        op: SemiringOp,
        value: f32,
        domain: &'static str,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precision mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("tile role mismatch: {0}")]
    TileRole(String),

    #[error("closure still changing after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("longest-path closure requires an acyclic graph")]
    DagRequired,

    #[error("spanning-forest extraction requires pairwise distinct edge weights")]
    DistinctWeightsRequired,

    #[error("{op} is not a closure opcode")]
    NotClosureOp { op: SemiringOp },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex index {index} out of range for n = {n} at line {line}")]
    Index { line: usize, index: usize, n: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
