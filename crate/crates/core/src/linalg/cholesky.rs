use super::{Matrix, SymMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lower-triangular factor `L` with `L·Lᵀ = M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cholesky<T> {
    l: Matrix<T>,
}

/// Cholesky–Banachiewicz factorization of a symmetric positive definite matrix.
///
/// Fails with [`Error::NotPositiveDefinite`] at the first pivot that is not
/// strictly positive.
pub fn cholesky<T: Scalar>(m: &SymMatrix<T>) -> Result<Cholesky<T>> {
    let n = m.order();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m[(i, j)];
            for k in 0..j {
                sum = sum - l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if sum <= T::zero() || !sum.is_finite() {
                    return Err(Error::NotPositiveDefinite { pivot: i });
                }
                l[(i, i)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Ok(Cholesky { l })
}

impl<T: Scalar> Cholesky<T> {
    pub fn factor(&self) -> &Matrix<T> {
        &self.l
    }

    pub fn into_factor(self) -> Matrix<T> {
        self.l
    }

    pub fn order(&self) -> usize {
        self.l.rows()
    }

    /// Solves `L·y = b` by forward substitution.
    pub fn solve_lower(&self, b: &[T]) -> Vec<T> {
        let n = self.order();
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let row = &self.l.row(i)[..i];
            let acc: T = row.iter().zip(&y[..i]).map(|(&l, &v)| l * v).sum();
            y[i] = (b[i] - acc) / self.l[(i, i)];
        }
        y
    }

    /// Solves `Lᵀ·x = y` by back substitution.
    pub fn solve_upper_transposed(&self, y: &[T]) -> Vec<T> {
        let n = self.order();
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let acc: T = (i + 1..n).map(|k| self.l[(k, i)] * x[k]).sum();
            x[i] = (y[i] - acc) / self.l[(i, i)];
        }
        x
    }

    /// `L·Lᵀ`.
    pub fn reconstruct(&self) -> SymMatrix<T> {
        let n = self.order();
        SymMatrix::from_fn(n, |i, j| {
            (0..=i.min(j)).map(|k| self.l[(i, k)] * self.l[(j, k)]).sum()
        })
    }
}
