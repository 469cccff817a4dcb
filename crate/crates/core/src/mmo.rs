//! Arbitrary-shape `D = C ⊕ (A ⊗ B)` assembled from tile micro-ops.

use std::sync::OnceLock;

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};
use crate::matrix::{MatrixBuffer, OpCounters};
use crate::semiring::{with_kernel, Kernel, PrecisionMode, SemiringOp};
use crate::tile::{fold_tile, load_window, store_window, TILE_DIM};

/// Environment variable capping the worker count (`0` or unset means auto).
pub const THREADS_ENV: &str = "SEMIRING_MXU_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MmoConfig {
    /// Scan every input for domain violations before computing.
    pub check_domain: bool,
    /// Compute output tile rows on worker threads.
    pub parallel: bool,
}

impl Default for MmoConfig {
    fn default() -> Self {
        Self {
            check_domain: true,
            parallel: true,
        }
    }
}

impl MmoConfig {
    /// Skips the entry scan so op counting is not distorted by O(mn) passes.
    pub fn bench() -> Self {
        Self {
            check_domain: false,
            parallel: true,
        }
    }

    pub fn sequential() -> Self {
        Self {
            parallel: false,
            ..Self::default()
        }
    }
}

/// Number of tile mmo calls for an `m × k` by `k × n` product.
pub fn tile_count(m: usize, n: usize, k: usize) -> u64 {
    tile_count_for(m, n, k, TILE_DIM)
}

pub fn tile_count_for(m: usize, n: usize, k: usize, dim: usize) -> u64 {
    (m.div_ceil(dim) * n.div_ceil(dim) * k.div_ceil(dim)) as u64
}

fn pool() -> Option<&'static ThreadPool> {
    static POOL: OnceLock<Option<ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n: usize = std::env::var(THREADS_ENV).ok()?.trim().parse().ok()?;
        if n == 0 {
            return None;
        }
        ThreadPoolBuilder::new().num_threads(n).build().ok()
    })
    .as_ref()
}

fn validate(
    op: SemiringOp,
    a: &MatrixBuffer,
    b: &MatrixBuffer,
    c: &MatrixBuffer,
    check_domain: bool,
) -> Result<()> {
    let ((m, k), (k2, n)) = (a.shape(), b.shape());
    if k != k2 || c.shape() != (m, n) {
        return Err(Error::Shape(format!(
            "A is {m}x{k}, B is {k2}x{n}, C is {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    if a.mode() != c.mode() || b.mode() != c.mode() {
        return Err(Error::ModeMismatch(format!(
            "A {}, B {}, C {}",
            a.mode(),
            b.mode(),
            c.mode()
        )));
    }
    if check_domain {
        a.check_domain(op, true)?;
        b.check_domain(op, true)?;
        c.check_domain(op, false)?;
    }
    Ok(())
}

/// `D = C ⊕ (A ⊗ B)` on 16×16 tiles, returning a fresh `D`.
pub fn mmo(
    op: SemiringOp,
    a: &MatrixBuffer,
    b: &MatrixBuffer,
    c: &MatrixBuffer,
    counters: &mut OpCounters,
) -> Result<MatrixBuffer> {
    mmo_with(op, a, b, c, counters, MmoConfig::default())
}

pub fn mmo_with(
    op: SemiringOp,
    a: &MatrixBuffer,
    b: &MatrixBuffer,
    c: &MatrixBuffer,
    counters: &mut OpCounters,
    config: MmoConfig,
) -> Result<MatrixBuffer> {
    let mut d = c.clone();
    mmo_in_place(op, a, b, &mut d, counters, config)?;
    Ok(d)
}

/// `acc ← acc ⊕ (A ⊗ B)`. The accumulator doubles as C and D; A and B are
/// borrowed immutably, so they can never alias the output.
pub fn mmo_in_place(
    op: SemiringOp,
    a: &MatrixBuffer,
    b: &MatrixBuffer,
    acc: &mut MatrixBuffer,
    counters: &mut OpCounters,
    config: MmoConfig,
) -> Result<()> {
    mmo_tiled::<TILE_DIM>(op, a, b, acc, counters, config)
}

/// [`mmo_in_place`] with an arbitrary tile edge `D`.
pub fn mmo_tiled<const D: usize>(
    op: SemiringOp,
    a: &MatrixBuffer,
    b: &MatrixBuffer,
    acc: &mut MatrixBuffer,
    counters: &mut OpCounters,
    config: MmoConfig,
) -> Result<()> {
    validate(op, a, b, acc, config.check_domain)?;
    let n = acc.cols();
    if acc.rows() == 0 || n == 0 {
        return Ok(());
    }
    let mode = acc.mode();
    let band_len = D * n;
    let work = |(bi, band): (usize, &mut [f32])| -> OpCounters {
        with_kernel!(op, K => band_product::<K, D>(op, a, b, band, bi * D, n, mode))
    };

    let row_bands = acc.rows().div_ceil(D);
    let ctr = if config.parallel && row_bands > 1 {
        let mut run = || {
            acc.as_mut_slice()
                .par_chunks_mut(band_len)
                .enumerate()
                .map(work)
                .reduce(OpCounters::new, |mut x, y| {
                    x.merge(&y);
                    x
                })
        };
        match pool() {
            Some(p) => p.install(run),
            None => run(),
        }
    } else {
        acc.as_mut_slice()
            .chunks_mut(band_len)
            .enumerate()
            .map(work)
            .fold(OpCounters::new(), |mut x, y| {
                x.merge(&y);
                x
            })
    };
    counters.merge(&ctr);
    Ok(())
}

/// Computes every output tile in one band of `D` rows. `band` is the
/// accumulator slice for rows `row0..row0 + band.len() / n`.
fn band_product<K: Kernel, const D: usize>(
    op: SemiringOp,
    a: &MatrixBuffer,
    b: &MatrixBuffer,
    band: &mut [f32],
    row0: usize,
    n: usize,
    mode: PrecisionMode,
) -> OpCounters {
    let pads = op.identity_and_padding();
    let (m, k) = a.shape();
    let band_rows = band.len() / n;
    let mut ctr = OpCounters::new();
    for col0 in (0..n).step_by(D) {
        let mut acc = load_window::<D>(
            band,
            n,
            band_rows,
            0,
            col0,
            pads.oplus_identity,
            PrecisionMode::Exact32,
        );
        ctr.loads += 1;
        for k0 in (0..k).step_by(D) {
            let at = load_window::<D>(a.as_slice(), k, m, row0, k0, pads.pad_a, mode);
            let bt = load_window::<D>(b.as_slice(), n, k, k0, col0, pads.pad_b, mode);
            ctr.loads += 2;
            fold_tile::<K, D>(&at, &bt, &mut acc);
            ctr.tile_ops += 1;
        }
        store_window(band, n, band_rows, &acc, 0, col0);
        ctr.stores += 1;
    }
    ctr
}

/// Untiled triple loop with the same fold order as the tiled engine: seeded
/// with `C(i, j)`, then `t = 0..k` ascending.
pub fn mmo_reference(
    op: SemiringOp,
    a: &MatrixBuffer,
    b: &MatrixBuffer,
    c: &MatrixBuffer,
) -> Result<MatrixBuffer> {
    validate(op, a, b, c, true)?;
    let mode = c.mode();
    let (m, k) = a.shape();
    let n = b.cols();
    let mut d = c.clone();
    for i in 0..m {
        for j in 0..n {
            let mut acc = c.get(i, j);
            for t in 0..k {
                let x = op.otimes_raw(mode.quantize(a.get(i, t)), mode.quantize(b.get(t, j)));
                acc = op.oplus_raw(acc, x);
            }
            d.set(i, j, acc);
        }
    }
    Ok(d)
}
