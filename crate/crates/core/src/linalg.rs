//! Small dense matrices over any [`Scalar`], plus a few `f64` routines backed
//! by nalgebra.

use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::jets::Scalar;
use crate::{Error, Result};

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Clone> Mat<S> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn map<T: Clone>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.n + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.n + j]
    }
}

impl Mat<f64> {
    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn mul(&self, other: &Mat<f64>) -> Mat<f64> {
        let n = self.n;
        Mat::from_fn(n, |i, j| (0..n).map(|k| self[(i, k)] * other[(k, j)]).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Mat<f64>) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let m = self.to_nalgebra();
        let sym = (&m + m.transpose()) * 0.5;
        let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

/// Inverse by Gauss-Jordan elimination with partial pivoting on the order-0
/// values.
pub fn inverse<S: Scalar>(m: &Mat<S>) -> Result<Mat<S>> {
    let n = m.n;
    let mut a = m.clone();
    let one = m.data[0].lift(1.0);
    let zero = m.data[0].lift(0.0);
    let mut inv = Mat::from_fn(n, |i, j| if i == j { one.clone() } else { zero.clone() });
    let scale = m.data.iter().fold(0.0f64, |s, v| s.max(v.value().abs()));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[(p, col)].value().abs().total_cmp(&a[(q, col)].value().abs()))
            .unwrap();
        if !(a[(pivot, col)].value().abs() > 1e-300 + scale * 1e-15) {
            return Err(Error::Singular);
        }
        if pivot != col {
            for j in 0..n {
                a.data.swap(pivot * n + j, col * n + j);
                inv.data.swap(pivot * n + j, col * n + j);
            }
        }
        let p = a[(col, col)].recip();
        for j in 0..n {
            a[(col, j)] = a[(col, j)].clone() * p.clone();
            inv[(col, j)] = inv[(col, j)].clone() * p.clone();
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[(row, col)].clone();
            for j in 0..n {
                a[(row, j)] = a[(row, j)].clone() - factor.clone() * a[(col, j)].clone();
                inv[(row, j)] = inv[(row, j)].clone() - factor.clone() * inv[(col, j)].clone();
            }
        }
    }
    Ok(inv)
}

/// Determinant by elimination with partial pivoting.
pub fn det<S: Scalar>(m: &Mat<S>) -> Result<S> {
    let n = m.n;
    let mut a = m.clone();
    let mut acc = m.data[0].lift(1.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[(p, col)].value().abs().total_cmp(&a[(q, col)].value().abs()))
            .unwrap();
        if a[(pivot, col)].value() == 0.0 {
            return Err(Error::Singular);
        }
        if pivot != col {
            for j in 0..n {
                a.data.swap(pivot * n + j, col * n + j);
            }
            acc = -acc;
        }
        let p = a[(col, col)].clone();
        acc = acc * p.clone();
        let pinv = p.recip();
        for row in col + 1..n {
            let factor = a[(row, col)].clone() * pinv.clone();
            for j in col..n {
                a[(row, j)] = a[(row, j)].clone() - factor.clone() * a[(col, j)].clone();
            }
        }
    }
    Ok(acc)
}

/// Least-squares solution of a dense `rows x cols` system (row-major `a`).
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    pub rank: usize,
    /// Ratio of largest to smallest singular value.
    pub condition: f64,
}

pub fn least_squares(rows: usize, cols: usize, a: &[f64], b: &[f64]) -> Result<LeastSquares> {
    if a.len() != rows * cols || b.len() != rows {
        return Err(Error::Dimension {
            expected: rows * cols,
            got: a.len(),
        });
    }
    let m = DMatrix::from_row_slice(rows, cols, a);
    let rhs = DVector::from_column_slice(b);
    let svd = m.svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().fold(0.0f64, |m, &s| m.max(s));
    let smin = sv.iter().fold(f64::INFINITY, |m, &s| m.min(s));
    let eps = smax * 1e-13 * (rows.max(cols) as f64);
    let rank = sv.iter().filter(|&&s| s > eps).count();
    let x = svd
        .solve(&rhs, eps)
        .map_err(|_| Error::RankDeficient { rank, cols })?;
    Ok(LeastSquares {
        solution: x.iter().copied().collect(),
        rank,
        condition: if smin > 0.0 { smax / smin } else { f64::INFINITY },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::seed;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_and_det_f64() {
        let m = Mat::from_fn(3, |i, j| if i == j { 4.0 } else { 1.0 / (1.0 + (i + j) as f64) });
        let inv = inverse(&m).unwrap();
        assert!(m.mul(&inv).max_abs_diff(&Mat::identity(3)) < 1e-14);
        let d = det(&m).unwrap();
        let ev = m.symmetric_eigenvalues();
        assert_relative_eq!(d, ev.iter().product::<f64>(), max_relative = 1e-12);
    }

    #[test]
    fn inverse_of_jets_differentiates() {
        // d/dt of [[1+t, 2],[0, 3]]^{-1}_{00} = -1/(1+t)^2
        let t = seed(&[0.5], &[0], 2).unwrap().remove(0);
        let m = Mat::from_fn(2, |i, j| match (i, j) {
            (0, 0) => t.clone() + 1.0,
            (0, 1) => t.lift(2.0),
            (1, 0) => t.lift(0.0),
            _ => t.lift(3.0),
        });
        let inv = inverse(&m).unwrap();
        assert_relative_eq!(inv[(0, 0)].derivative(&[1]).unwrap(), -1.0 / 2.25, epsilon = 1e-14);
        assert_relative_eq!(det(&m).unwrap().derivative(&[1]).unwrap(), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_rejected() {
        let m = Mat::from_fn(2, |_, _| 1.0);
        assert_eq!(inverse(&m).unwrap_err(), Error::Singular);
    }

    #[test]
    fn least_squares_line_fit() {
        // y = 2x + 1 on 4 points
        let xs = [0.0, 1.0, 2.0, 3.0];
        let a: Vec<f64> = xs.iter().flat_map(|&x| [x, 1.0]).collect();
        let b: Vec<f64> = xs.iter().map(|&x| 2.0 * x + 1.0).collect();
        let ls = least_squares(4, 2, &a, &b).unwrap();
        assert_eq!(ls.rank, 2);
        assert_relative_eq!(ls.solution[0], 2.0, epsilon = 1e-13);
        assert_relative_eq!(ls.solution[1], 1.0, epsilon = 1e-13);
    }
}
