//! Small dense matrices: enough for regression normal equations and
//! Hessian inversion on a handful of parameters.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pivots below this (after unit-diagonal scaling) count as rank loss.
pub const PIVOT_TOLERANCE: f64 = 1e-10;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix whose columns are the given equal-length vectors.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::invalid("design columns have different lengths"));
        }
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self^T self`
    pub fn gram(&self) -> Self {
        let k = self.cols;
        let mut g = Self::zeros(k, k);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..k {
                for b in a..k {
                    g[(a, b)] += r[a] * r[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }

    /// `self^T v`
    pub fn t_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, vi) in v.iter().enumerate().take(self.rows) {
            for (o, x) in out.iter_mut().zip(self.row(i)) {
                *o += x * vi;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn symmetrize(&mut self) {
        for i in 0..self.rows {
            for j in 0..i {
                let m = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = m;
                self[(j, i)] = m;
            }
        }
    }

    /// Inverse of a symmetric positive-diagonal matrix.
    ///
    /// The matrix is scaled to unit diagonal before Gauss-Jordan elimination
    /// with partial pivoting, so the pivot test is relative.
    pub fn invert_symmetric(&self) -> Result<Self> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::invalid("cannot invert a non-square matrix"));
        }
        let mut scale = vec![0.0; n];
        for (i, s) in scale.iter_mut().enumerate() {
            let d = self[(i, i)];
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::RankDeficient { pivot: 0.0 });
            }
            *s = 1.0 / d.sqrt();
        }
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = self[(i, j)] * scale[i] * scale[j];
            }
        }
        let mut inv = a.gauss_jordan()?;
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] *= scale[i] * scale[j];
            }
        }
        inv.symmetrize();
        Ok(inv)
    }

    fn gauss_jordan(mut self) -> Result<Self> {
        let n = self.rows;
        let mut inv = Self::identity(n);
        for col in 0..n {
            let (piv, best) = (col..n)
                .map(|r| (r, self[(r, col)].abs()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best.is_nan() || best <= PIVOT_TOLERANCE {
                return Err(Error::RankDeficient { pivot: best.max(0.0) });
            }
            if piv != col {
                for j in 0..n {
                    self.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = self[(col, col)];
            for j in 0..n {
                self[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = self[(r, col)];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    self[(r, j)] -= f * self[(col, j)];
                    inv[(r, j)] -= f * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_spd_matrix() {
        let a = Matrix::from_row_major(3, 3, vec![4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]).unwrap();
        let inv = a.invert_symmetric().unwrap();
        let id = a.mul(&inv);
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn badly_scaled_but_regular() {
        let a = Matrix::from_row_major(2, 2, vec![1e-20, 1e-12, 1e-12, 4.0]).unwrap();
        let inv = a.invert_symmetric().unwrap();
        let id = a.mul(&inv);
        assert!((id[(0, 0)] - 1.0).abs() < 1e-10);
        assert!((id[(1, 1)] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn singular_rejected() {
        let a = Matrix::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(a.invert_symmetric(), Err(Error::RankDeficient { .. })));
        let z = Matrix::from_row_major(2, 2, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(z.invert_symmetric().is_err());
    }

    #[test]
    fn gram_matches_explicit_product() {
        let x = Matrix::from_columns(&[vec![1.0, 2.0, 3.0], vec![0.5, -1.0, 4.0]]).unwrap();
        assert_eq!(x.gram(), x.transpose().mul(&x));
        assert_eq!(x.t_mul_vec(&[1.0, 1.0, 1.0]), vec![6.0, 3.5]);
    }
}
