//! Dense row-major real matrices.
//!
//! Values are immutable: every operation allocates a fresh result. Entries
//! are checked for finiteness on construction, so downstream code never has
//! to worry about NaN propagation from inputs.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries.
    ///
    /// Zero-sized dimensions are accepted so that thin factors of a rank-zero
    /// matrix (`ℓ×0`) can be represented.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Length {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Internal constructor for results of arithmetic on finite inputs.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::shape("from_rows", (i, r.len()), (i, cols)));
            }
            data.extend_from_slice(r);
        }
        Matrix::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_raw(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Result<Self> {
        let n = d.len();
        let mut data = vec![0.0; n * n];
        for (i, &x) in d.iter().enumerate() {
            data[i * n + i] = x;
        }
        Matrix::new(n, n, data)
    }

    /// Column vector (`n×1`).
    pub fn column(v: &[f64]) -> Result<Self> {
        Matrix::new(v.len(), 1, v.to_vec())
    }

    /// Builds a matrix from a list of equally long column vectors.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, |c| c.len());
        let mut data = vec![0.0; nrows * ncols];
        for (j, c) in cols.iter().enumerate() {
            if c.len() != nrows {
                return Err(Error::shape("from_columns", (c.len(), 1), (nrows, 1)));
            }
            for (i, &x) in c.iter().enumerate() {
                data[i * ncols + j] = x;
            }
        }
        Matrix::new(nrows, ncols, data)
    }

    /// Fills a matrix entrywise from a closure.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix::new(rows, cols, data)
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let (m, n) = self.shape();
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                data[j * m + i] = self.data[i * n + j];
            }
        }
        Matrix::from_raw(n, m, data)
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::shape("matmul", self.shape(), other.shape()));
        }
        let (m, n, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![0.0; m * p];
        for i in 0..m {
            let out_row = &mut out[i * p..(i + 1) * p];
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * p..(k + 1) * p];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += aik * b;
                }
            }
        }
        Ok(Matrix::from_raw(m, p, out))
    }

    /// `selfᵀ · other` without materializing the transpose.
    pub fn t_matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::shape("t_matmul", (self.cols, self.rows), other.shape()));
        }
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![0.0; m * p];
        for k in 0..n {
            let a_row = &self.data[k * m..(k + 1) * m];
            let b_row = &other.data[k * p..(k + 1) * p];
            for (i, &aki) in a_row.iter().enumerate() {
                if aki == 0.0 {
                    continue;
                }
                let out_row = &mut out[i * p..(i + 1) * p];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += aki * b;
                }
            }
        }
        Ok(Matrix::from_raw(m, p, out))
    }

    /// `self · otherᵀ` without materializing the transpose.
    pub fn matmul_t(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::shape("matmul_t", self.shape(), (other.cols, other.rows)));
        }
        let (m, n, p) = (self.rows, self.cols, other.rows);
        let mut out = vec![0.0; m * p];
        for i in 0..m {
            let a_row = self.row(i);
            for j in 0..p {
                out[i * p + j] = dot(a_row, other.row(j));
            }
        }
        debug_assert_eq!(n, self.cols);
        Ok(Matrix::from_raw(m, p, out))
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with("add", other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with("sub", other, |a, b| a - b)
    }

    fn zip_with(&self, op: &'static str, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::shape(op, self.shape(), other.shape()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Matrix::from_raw(self.rows, self.cols, data))
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix::from_raw(self.rows, self.cols, self.data.iter().map(|x| x * s).collect())
    }

    /// Frobenius norm, computed with scaling so that huge or tiny entries do
    /// not overflow or underflow.
    pub fn frob_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0.0)
    }

    /// `‖self − selfᵀ‖_F`; `None` for non-square input.
    pub fn asymmetry(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut acc = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                acc.push(self.get(i, j) - self.get(j, i));
            }
        }
        Some(norm2(&acc))
    }

    /// Sub-block of columns `start..end`.
    pub fn columns(&self, start: usize, end: usize) -> Matrix {
        assert!(start <= end && end <= self.cols);
        let w = end - start;
        let mut data = Vec::with_capacity(self.rows * w);
        for i in 0..self.rows {
            data.extend_from_slice(&self.row(i)[start..end]);
        }
        Matrix::from_raw(self.rows, w, data)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for x in self.row(i) {
                write!(f, "{x:>12.6e} ")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.matmul(b)
}

pub fn transpose(a: &Matrix) -> Matrix {
    a.transpose()
}

pub fn frob_norm(a: &Matrix) -> f64 {
    a.frob_norm()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm with scaling (LAPACK `dnrm2` style).
pub(crate) fn norm2(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let ss: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * ss.sqrt()
}
