use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semiring::{PrecisionMode, SemiringOp};

/// Dense row-major `rows × cols` matrix of f32 cells tagged with the precision
/// mode it is operated under.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixBuffer {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
    mode: PrecisionMode,
}

impl MatrixBuffer {
    pub fn filled(rows: usize, cols: usize, value: f32, mode: PrecisionMode) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
            mode,
        }
    }

    pub fn zeros(rows: usize, cols: usize, mode: PrecisionMode) -> Self {
        Self::filled(rows, cols, 0.0, mode)
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f32>, mode: PrecisionMode) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            data,
            mode,
        })
    }

    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R], mode: PrecisionMode) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} values, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(rows.len(), cols, data, mode)
    }

    pub fn identity_pattern(n: usize, diag: f32, off: f32, mode: PrecisionMode) -> Self {
        let mut m = Self::filled(n, n, off, mode);
        for i in 0..n {
            m.set(i, i, diag);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn mode(&self) -> PrecisionMode {
        self.mode
    }

    pub fn with_mode(mut self, mode: PrecisionMode) -> Self {
        self.mode = mode;
        self
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows, self.mode);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(f32) -> f32) -> Self {
        Self {
            data: self.data.iter().map(|&x| f(x)).collect(),
            ..self.clone()
        }
    }

    /// Copies the `rows × cols` window starting at `(row0, col0)`.
    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols, self.mode);
        for r in 0..rows {
            out.data[r * cols..(r + 1) * cols].copy_from_slice(&self.row(row0 + r)[col0..col0 + cols]);
        }
        out
    }

    /// Fails on the first cell outside `op`'s domain, after rounding to half
    /// precision when `quantized` is set.
    pub fn check_domain(&self, op: SemiringOp, quantized: bool) -> Result<()> {
        let domain = op.domain();
        let mode = if quantized {
            self.mode
        } else {
            PrecisionMode::Exact32
        };
        match self.data.iter().find(|&&x| !domain.contains(mode.quantize(x))) {
            Some(&bad) => op.check(mode.quantize(bad)),
            None => Ok(()),
        }
    }

    /// Largest absolute cellwise difference over cells where both sides are
    /// finite; mismatched infinities count as `+∞`.
    pub fn max_abs_diff(&self, other: &MatrixBuffer) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "cannot compare {:?} with {:?}",
                self.shape(),
                other.shape()
            )));
        }
        let mut worst = 0.0f64;
        for (&a, &b) in self.data.iter().zip(&other.data) {
            let d = if a == b {
                0.0
            } else if a.is_finite() && b.is_finite() {
                (f64::from(a) - f64::from(b)).abs()
            } else {
                f64::INFINITY
            };
            worst = worst.max(d);
        }
        Ok(worst)
    }
}

/// Tile-level operation accounting for one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OpCounters {
    pub tile_ops: u64,
    pub loads: u64,
    pub stores: u64,
    pub iterations: u64,
    pub wall_time: f64,
}

impl OpCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn merge(&mut self, other: &OpCounters) {
        self.tile_ops += other.tile_ops;
        self.loads += other.loads;
        self.stores += other.stores;
        self.iterations += other.iterations;
        self.wall_time += other.wall_time;
    }
}

impl AddAssign<&OpCounters> for OpCounters {
    fn add_assign(&mut self, rhs: &OpCounters) {
        self.merge(rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_rejects_ragged() {
        let rows = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(matches!(
            MatrixBuffer::from_rows(&rows, PrecisionMode::Exact32),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn transpose_and_submatrix() {
        let m = MatrixBuffer::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]], PrecisionMode::Exact32).unwrap();
        let t = m.transpose();
        assert_eq!(t.shape(), (3, 2));
        assert_eq!(t.get(2, 1), 6.0);
        let s = m.submatrix(1, 1, 1, 2);
        assert_eq!(s.as_slice(), &[5.0, 6.0]);
    }

    #[test]
    fn domain_check_reports_offender() {
        let m = MatrixBuffer::from_rows(&[[0.0, 1.0], [0.5, 1.0]], PrecisionMode::Exact32).unwrap();
        match m.check_domain(SemiringOp::OrAnd, true) {
            Err(Error::Domain { value, .. }) => assert_eq!(value, 0.5),
            other => panic!("{other:?}"),
        }
        assert!(m.check_domain(SemiringOp::MaxMul, true).is_ok());
    }

    #[test]
    fn max_abs_diff_handles_infinities() {
        let inf = f32::INFINITY;
        let a = MatrixBuffer::from_rows(&[[0.0, inf]], PrecisionMode::Exact32).unwrap();
        let b = MatrixBuffer::from_rows(&[[0.5, inf]], PrecisionMode::Exact32).unwrap();
        assert_eq!(a.max_abs_diff(&b).unwrap(), 0.5);
        let c = MatrixBuffer::from_rows(&[[0.0, 1.0]], PrecisionMode::Exact32).unwrap();
        assert_eq!(a.max_abs_diff(&c).unwrap(), f64::INFINITY);
    }
}
