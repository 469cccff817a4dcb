use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closure::ClosureScheme;
use crate::error::{Error, Result};
use crate::semiring::{PrecisionMode, SemiringOp};

/// The applications exposed on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Apsp,
    Aplp,
    Mcp,
    Maxrp,
    Minrp,
    Mst,
    Gtc,
    Knn,
}

impl Problem {
    pub const ALL: [Problem; 8] = [
        Problem::Apsp,
        Problem::Aplp,
        Problem::Mcp,
        Problem::Maxrp,
        Problem::Minrp,
        Problem::Mst,
        Problem::Gtc,
        Problem::Knn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Apsp => "apsp",
            Problem::Aplp => "aplp",
            Problem::Mcp => "mcp",
            Problem::Maxrp => "maxrp",
            Problem::Minrp => "minrp",
            Problem::Mst => "mst",
            Problem::Gtc => "gtc",
            Problem::Knn => "knn",
        }
    }

    pub fn op(self) -> SemiringOp {
        match self {
            Problem::Apsp => SemiringOp::MinPlus,
            Problem::Aplp => SemiringOp::MaxPlus,
            Problem::Mcp => SemiringOp::MaxMin,
            Problem::Maxrp => SemiringOp::MaxMul,
            Problem::Minrp => SemiringOp::MinMul,
            Problem::Mst => SemiringOp::MinMax,
            Problem::Gtc => SemiringOp::OrAnd,
            Problem::Knn => SemiringOp::AddNorm,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown problem '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    BellmanFord,
    Leyzorek,
    Oracle,
}

impl Algorithm {
    pub fn scheme(self) -> Option<ClosureScheme> {
        match self {
            Algorithm::BellmanFord => Some(ClosureScheme::BellmanFord),
            Algorithm::Leyzorek => Some(ClosureScheme::Leyzorek),
            Algorithm::Oracle => None,
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bf" | "bellman_ford" => Ok(Algorithm::BellmanFord),
            "leyzorek" => Ok(Algorithm::Leyzorek),
            "oracle" => Ok(Algorithm::Oracle),
            other => Err(Error::Config(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub matched: bool,
    /// Serialized as `null` when infinities disagree.
    pub max_abs_diff: f64,
}

/// One solve, serialized as a single JSON object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub problem: Problem,
    pub op: SemiringOp,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub algorithm: Algorithm,
    pub precision: PrecisionMode,
    pub iterations: u64,
    pub tile_ops: u64,
    pub loads: u64,
    pub stores: u64,
    pub wall_time_seconds: f64,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<Validation>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON with `wall_time_seconds` zeroed, for reproducibility comparisons.
    pub fn to_json_without_time(&self) -> String {
        RunReport {
            wall_time_seconds: 0.0,
            ..self.clone()
        }
        .to_json()
    }
}
