//! Small dense matrices in double-double precision.
//!
//! Everything here is at most 4×4, so the algorithms are the textbook ones:
//! Gauss-Jordan inversion with partial pivoting and cyclic Jacobi rotations for
//! symmetric eigendecomposition.

use alloc::vec;
use alloc::vec::Vec;

use crate::real::{Real, ONE, ZERO};

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Real>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_f64(rows: usize, cols: usize, values: &[f64]) -> Self {
        debug_assert_eq!(values.len(), rows * cols);
        Self { rows, cols, data: values.iter().map(|&v| Real::from(v)).collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Real) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = ZERO;
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, j)];
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Real]) -> Vec<Real> {
        debug_assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = ZERO;
                for k in 0..self.cols {
                    acc += self[(i, k)] * v[k];
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + other[(i, j)])
    }

    /// Rows `ri` and columns `ci` of `self`.
    pub fn select(&self, ri: &[usize], ci: &[usize]) -> Matrix {
        Self::from_fn(ri.len(), ci.len(), |i, j| self[(ri[i], ci[j])])
    }

    pub fn max_abs(&self) -> Real {
        self.data.iter().fold(ZERO, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let scale = self.max_abs().hi().max(1.0);
        (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs().hi() <= tol * scale))
    }

    /// Averages the matrix with its transpose.
    pub fn symmetrized(&self) -> Matrix {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)]) * 0.5)
    }

    /// Zeroes entries smaller than `rel` times the largest entry.
    pub fn pruned(self, rel: f64) -> Matrix {
        let cut = self.max_abs().hi() * rel;
        self.pruned_below(cut)
    }

    pub fn pruned_below(mut self, cut: f64) -> Matrix {
        for v in &mut self.data {
            if v.abs().hi() <= cut {
                *v = ZERO;
            }
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.hi() == 0.0)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].hi() == 0.0))
    }

    /// xᵀ M x.
    pub fn quadratic_form(&self, x: &[Real]) -> Real {
        let mx = self.mul_vec(x);
        x.iter().zip(&mx).fold(ZERO, |acc, (a, b)| acc + *a * *b)
    }

    /// Gauss-Jordan inverse; `None` when a pivot vanishes relative to the scale.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.rows;
        debug_assert_eq!(n, self.cols);
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        let scale = a.max_abs().hi();
        if scale == 0.0 {
            return None;
        }
        for col in 0..n {
            let pivot = (col..n).max_by(|&x, &y| a[(x, col)].abs().hi().total_cmp(&a[(y, col)].abs().hi()))?;
            if a[(pivot, col)].abs().hi() <= scale * 1e-26 {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= p;
                inv[(col, j)] /= p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f.hi() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let aj = a[(col, j)];
                    let ij = inv[(col, j)];
                    a[(i, j)] -= f * aj;
                    inv[(i, j)] -= f * ij;
                }
            }
        }
        Some(inv)
    }

    /// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
    ///
    /// Returns the eigenvalues and a matrix whose columns are the matching
    /// orthonormal eigenvectors, so `self = V diag(λ) Vᵀ`.
    pub fn symmetric_eigen(&self) -> (Vec<Real>, Matrix) {
        let n = self.rows;
        let mut a = self.symmetrized();
        let mut v = Matrix::identity(n);
        let scale = a.max_abs().hi();
        for _sweep in 0..64 {
            let mut off = 0.0;
            for i in 0..n {
                for j in 0..i {
                    off += a[(i, j)].hi().abs();
                }
            }
            if off <= scale * 1e-33 || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.hi().abs() <= scale * 1e-40 {
                        a[(p, q)] = ZERO;
                        a[(q, p)] = ZERO;
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (apq * 2.0);
                    let sign = if theta.hi() >= 0.0 { ONE } else { -ONE };
                    let t = sign / (theta.abs() + (theta * theta + ONE).sqrt());
                    let c = ONE / (t * t + ONE).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        ((0..n).map(|i| a[(i, i)]).collect(), v)
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = Real;
    fn index(&self, (i, j): (usize, usize)) -> &Real {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Real {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        a.rows == b.rows && a.cols == b.cols && a.data.iter().zip(&b.data).all(|(x, y)| (*x - *y).abs().hi() <= tol)
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_f64(3, 3, &[2.0, 1.0, 0.5, -1.0, 3.0, 0.0, 0.25, 0.0, 1.5]);
        let inv = m.inverse().unwrap();
        assert!(close(&m.mul(&inv), &Matrix::identity(3), 1e-28));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = Matrix::from_f64(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(m.inverse().is_none());
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let m =
            Matrix::from_f64(4, 4, &[4.0, 1.0, 0.5, 0.0, 1.0, 3.0, 0.2, 0.1, 0.5, 0.2, 2.0, 0.3, 0.0, 0.1, 0.3, 1.0]);
        let (vals, vecs) = m.symmetric_eigen();
        let d = Matrix::from_fn(4, 4, |i, j| if i == j { vals[i] } else { ZERO });
        let rebuilt = vecs.mul(&d).mul(&vecs.transpose());
        assert!(close(&rebuilt, &m, 1e-28));
        assert!(close(&vecs.transpose().mul(&vecs), &Matrix::identity(4), 1e-28));
    }

    #[test]
    fn diagonal_matrix_is_left_alone() {
        let m = Matrix::from_f64(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let (vals, vecs) = m.symmetric_eigen();
        assert_eq!(vals[0].hi(), 2.0);
        assert_eq!(vals[1].hi(), 1.0);
        assert!(vecs.is_diagonal());
    }
}
