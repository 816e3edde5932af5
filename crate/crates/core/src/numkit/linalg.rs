use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Pivots smaller than this fraction of the largest `|R_jj|` mark the design
/// as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().copied().collect();
        Matrix::from_row_major(rows.len(), cols, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matvec: {} columns vs vector of length {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `Xᵀ v`.
    pub fn tr_matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::Dimension(format!(
                "transpose matvec: {} rows vs vector of length {}",
                self.rows,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (r, &vr) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a * vr;
            }
        }
        Ok(out)
    }
}

/// Least-squares solution of `X β ≈ y` by Householder QR.
///
/// The system is rejected as singular when any `|R_kk|` falls below
/// [`RANK_TOLERANCE`] times the largest diagonal magnitude of `R`.
pub fn solve_least_squares(x: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    let (n, p) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(Error::Dimension(format!(
            "design has {n} rows but response has {}",
            y.len()
        )));
    }
    if p == 0 || n < p {
        return Err(Error::Dimension(format!(
            "least squares needs n >= p >= 1, got n={n}, p={p}"
        )));
    }
    if x.as_slice().iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite entry in least-squares system".into()));
    }

    let a = DMatrix::from_row_slice(n, p, x.as_slice());
    let qr = a.qr();
    let r = qr.r();
    let diag_max = (0..p).map(|k| r[(k, k)].abs()).fold(0.0, f64::max);
    for k in 0..p {
        if !(r[(k, k)].abs() > RANK_TOLERANCE * diag_max) {
            return Err(Error::SingularSystem(format!(
                "column {k} is (numerically) a combination of earlier columns"
            )));
        }
    }
    let qty = qr.q().transpose() * DVector::from_column_slice(y);
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::SingularSystem("triangular solve failed".into()))?;
    Ok(beta.iter().copied().collect())
}
