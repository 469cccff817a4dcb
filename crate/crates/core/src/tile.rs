//! Fixed-shape micro-kernel: load a tile, run one tile-level
//! D = C ⊕ (A ⊗ B), store a tile.

use crate::error::{Error, Result};
use crate::matrix::{MatrixBuffer, OpCounters};
use crate::semiring::{with_kernel, Kernel, PrecisionMode, SemiringOp};

/// Edge length of the hardware tile.
pub const TILE_DIM: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TileRole {
    InputA,
    InputB,
    Accumulator,
}

/// A `D × D` block of values. `D` is [`TILE_DIM`] unless a test asks for
/// something smaller.
#[derive(Clone, Debug, PartialEq)]
pub struct Tile<const D: usize = TILE_DIM> {
    pub values: [[f32; D]; D],
    pub role: TileRole,
}

impl<const D: usize> Tile<D> {
    pub fn filled(value: f32, role: TileRole) -> Self {
        Self {
            values: [[value; D]; D],
            role,
        }
    }

    /// Fill value for cells outside the source matrix.
    pub fn pad_value(op: SemiringOp, role: TileRole) -> f32 {
        let p = op.identity_and_padding();
        match role {
            TileRole::InputA => p.pad_a,
            TileRole::InputB => p.pad_b,
            TileRole::Accumulator => p.oplus_identity,
        }
    }

    fn expect_role(&self, role: TileRole) -> Result<()> {
        if self.role == role {
            Ok(())
        } else {
            Err(Error::TileRole(format!(
                "expected {role:?} tile, got {:?}",
                self.role
            )))
        }
    }
}

/// Reads the window at `(row0, col0)` of a row-major `rows × cols` slice.
#[inline]
pub(crate) fn load_window<const D: usize>(
    data: &[f32],
    cols: usize,
    rows: usize,
    row0: usize,
    col0: usize,
    fill: f32,
    mode: PrecisionMode,
) -> [[f32; D]; D] {
    let mut out = [[fill; D]; D];
    let rmax = rows.saturating_sub(row0).min(D);
    let cmax = cols.saturating_sub(col0).min(D);
    for (r, out_row) in out.iter_mut().enumerate().take(rmax) {
        let src = &data[(row0 + r) * cols + col0..(row0 + r) * cols + col0 + cmax];
        match mode {
            PrecisionMode::Exact32 => out_row[..cmax].copy_from_slice(src),
            PrecisionMode::Mixed16 => {
                for (o, &s) in out_row[..cmax].iter_mut().zip(src) {
                    *o = mode.quantize(s);
                }
            }
        }
    }
    out
}

/// Writes the in-bounds part of a tile; returns the number of cells written.
#[inline]
pub(crate) fn store_window<const D: usize>(
    data: &mut [f32],
    cols: usize,
    rows: usize,
    values: &[[f32; D]; D],
    row0: usize,
    col0: usize,
) -> usize {
    let rmax = rows.saturating_sub(row0).min(D);
    let cmax = cols.saturating_sub(col0).min(D);
    for (r, row) in values.iter().enumerate().take(rmax) {
        data[(row0 + r) * cols + col0..(row0 + r) * cols + col0 + cmax].copy_from_slice(&row[..cmax]);
    }
    rmax * cmax
}

/// Folds `a ⊗ b` into `acc` in place. For every `(i, j)` the fold is seeded
/// with `acc[i][j]` and proceeds over `k` in ascending order.
#[inline]
pub(crate) fn fold_tile<K: Kernel, const D: usize>(
    a: &[[f32; D]; D],
    b: &[[f32; D]; D],
    acc: &mut [[f32; D]; D],
) {
    for (acc_row, a_row) in acc.iter_mut().zip(a) {
        for (&a_ik, b_row) in a_row.iter().zip(b) {
            for (c, &b_kj) in acc_row.iter_mut().zip(b_row) {
                *c = K::oplus(*c, K::otimes(a_ik, b_kj));
            }
        }
    }
}

pub(crate) fn fold_tile_dyn<const D: usize>(
    op: SemiringOp,
    a: &[[f32; D]; D],
    b: &[[f32; D]; D],
    acc: &mut [[f32; D]; D],
) {
    with_kernel!(op, K => fold_tile::<K, D>(a, b, acc))
}

/// Loads the `D × D` window at `(row0, col0)`. Out-of-bounds cells take the
/// role's padding value; input tiles are rounded to half in `Mixed16`.
pub fn tile_load<const D: usize>(
    src: &MatrixBuffer,
    row0: usize,
    col0: usize,
    op: SemiringOp,
    mode: PrecisionMode,
    role: TileRole,
    counters: &mut OpCounters,
) -> Tile<D> {
    let fill = Tile::<D>::pad_value(op, role);
    let quantize = match role {
        TileRole::Accumulator => PrecisionMode::Exact32,
        _ => mode,
    };
    counters.loads += 1;
    Tile {
        values: load_window::<D>(src.as_slice(), src.cols(), src.rows(), row0, col0, fill, quantize),
        role,
    }
}

/// One tile-level `d = c ⊕ (a ⊗ b)`.
pub fn tile_mmo<const D: usize>(
    op: SemiringOp,
    a: &Tile<D>,
    b: &Tile<D>,
    c: &Tile<D>,
    mode: PrecisionMode,
    counters: &mut OpCounters,
) -> Result<Tile<D>> {
    a.expect_role(TileRole::InputA)?;
    b.expect_role(TileRole::InputB)?;
    c.expect_role(TileRole::Accumulator)?;
    let mut qa = a.values;
    let mut qb = b.values;
    for v in qa.iter_mut().chain(qb.iter_mut()).flatten() {
        *v = mode.quantize(*v);
        op.check(*v)?;
    }
    let id = op.oplus_identity();
    for &v in c.values.iter().flatten() {
        if v != id {
            op.check(v)?;
        }
    }
    let mut out = c.clone();
    fold_tile_dyn(op, &qa, &qb, &mut out.values);
    counters.tile_ops += 1;
    Ok(out)
}

/// Stores an accumulator tile at `(row0, col0)`, clipped to `dst`. Returns
/// the number of cells written.
pub fn tile_store<const D: usize>(
    dst: &mut MatrixBuffer,
    tile: &Tile<D>,
    row0: usize,
    col0: usize,
    counters: &mut OpCounters,
) -> Result<usize> {
    tile.expect_role(TileRole::Accumulator)?;
    let (rows, cols) = dst.shape();
    counters.stores += 1;
    Ok(store_window(
        dst.as_mut_slice(),
        cols,
        rows,
        &tile.values,
        row0,
        col0,
    ))
}
