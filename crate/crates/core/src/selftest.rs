//! Quick invariant suite behind `semiring-mxu selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closure::{ceil_log2, closure_bellman_ford, closure_leyzorek};
use crate::generate::{generate_graph, GraphKind, GraphSpec, WeightDist};
use crate::graph::encode;
use crate::matrix::{MatrixBuffer, OpCounters};
use crate::mmo::{mmo, mmo_reference, tile_count};
use crate::oracles;
use crate::semiring::{round_to_half, PrecisionMode, SemiringOp};

type CheckFn = fn() -> Result<(), String>;

pub struct Check {
    pub name: &'static str,
    pub outcome: Result<(), String>,
}

fn random_operand(op: SemiringOp, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> MatrixBuffer {
    let data = (0..rows * cols)
        .map(|_| match op {
            SemiringOp::OrAnd => f32::from(u8::from(rng.gen_bool(0.5))),
            SemiringOp::MinMul => rng.gen_range(0.01..4.0),
            SemiringOp::MaxMul => rng.gen_range(0.0..4.0),
            _ => rng.gen_range(-8.0..8.0),
        })
        .collect();
    MatrixBuffer::from_vec(rows, cols, data, PrecisionMode::Exact32).expect("sized")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tiling_transparency() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for op in SemiringOp::ALL {
        for _ in 0..8 {
            let (m, n, k) = (
                rng.gen_range(1..=40),
                rng.gen_range(1..=40),
                rng.gen_range(1..=40),
            );
            let a = random_operand(op, m, k, &mut rng);
            let b = random_operand(op, k, n, &mut rng);
            let c = random_operand(op, m, n, &mut rng);
            let mut ctr = OpCounters::new();
            let d = mmo(op, &a, &b, &c, &mut ctr).map_err(|e| e.to_string())?;
            let want = mmo_reference(op, &a, &b, &c).map_err(|e| e.to_string())?;
            ensure(d == want, || format!("{op} {m}x{n}x{k}: tiled result differs"))?;
            ensure(ctr.tile_ops == tile_count(m, n, k), || {
                format!("{op}: tile count {}", ctr.tile_ops)
            })?;
        }
    }
    Ok(())
}

fn half_rounding() -> Result<(), String> {
    ensure(round_to_half(2049.0) == 2048.0, || {
        "2049 should round to 2048".into()
    })?;
    ensure(round_to_half(70000.0) == f32::INFINITY, || {
        "70000 should overflow".into()
    })
}

fn leyzorek_bound() -> Result<(), String> {
    for n in [8, 16, 33, 64] {
        let g = generate_graph(&GraphSpec::new(GraphKind::Path, n, 1)).map_err(|e| e.to_string())?;
        let w = encode(&g, SemiringOp::MinPlus, PrecisionMode::Exact32).map_err(|e| e.to_string())?;
        let r = closure_leyzorek(SemiringOp::MinPlus, &w, None).map_err(|e| e.to_string())?;
        ensure(r.iterations <= ceil_log2(n) + 1, || {
            format!("n={n}: {} iterations", r.iterations)
        })?;
    }
    Ok(())
}

fn oracle_agreement() -> Result<(), String> {
    for seed in 0..6 {
        let spec = GraphSpec {
            density: 0.2,
            weights: WeightDist::Integer { lo: 1, hi: 20 },
            ..GraphSpec::new(GraphKind::ErdosRenyi, 24, seed)
        };
        let g = generate_graph(&spec).map_err(|e| e.to_string())?;
        for op in [SemiringOp::MinPlus, SemiringOp::MaxMin, SemiringOp::MinMax] {
            let w = encode(&g, op, PrecisionMode::Exact32).map_err(|e| e.to_string())?;
            let bf = closure_bellman_ford(op, &w, None).map_err(|e| e.to_string())?;
            let ley = closure_leyzorek(op, &w, None).map_err(|e| e.to_string())?;
            let fw = oracles::generalized_floyd_warshall(op, &w);
            ensure(bf.matrix == fw && ley.matrix == fw, || {
                format!("{op} seed {seed}: closure differs from oracle")
            })?;
        }
    }
    Ok(())
}

pub fn run() -> Vec<Check> {
    let checks: [(&'static str, CheckFn); 4] = [
        ("half rounding", half_rounding),
        ("tiling transparency", tiling_transparency),
        ("leyzorek iteration bound", leyzorek_bound),
        ("closure vs floyd-warshall", oracle_agreement),
    ];
    checks
        .into_iter()
        .map(|(name, f)| Check { name, outcome: f() })
        .collect()
}
