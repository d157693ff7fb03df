//! Small dense linear algebra: symmetric matrices, Cholesky factorization,
//! cyclic Jacobi eigendecomposition and the symmetric-definite generalized
//! eigenproblem `C·v = λ·C̄·v`.
//!
//! Sized for channel counts (n ≤ 32); everything is row-major `Vec` storage.

mod cholesky;
mod generalized;
mod jacobi;

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use cholesky::{cholesky, Cholesky};
pub use generalized::{generalized_eigen, GenEigenResult};
pub use jacobi::{sym_eigen, SymEigen, MAX_SWEEPS};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::invalid("matrix must be non-empty"));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::dims(
                format!("{cols} columns"),
                format!("{} in row {bad}", rows[bad].len()),
            ));
        }
        let data: Vec<T> = rows.iter().flatten().copied().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks_exact(self.cols).map(<[T]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix<T>) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::dims(
                format!("{} rows on the right", self.cols),
                format!("{}", rhs.rows),
            ));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum()
        }))
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        self.data
            .chunks_exact(self.cols)
            .map(|r| dot(r, v))
            .collect()
    }

    pub fn scale(&self, alpha: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * alpha).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn determinant(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::dims("square matrix", format!("{}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for k in 0..n {
            let pivot = (k..n)
                .max_by(|&i, &j| a[(i, k)].abs().partial_cmp(&a[(j, k)].abs()).unwrap())
                .unwrap();
            if a[(pivot, k)] == T::zero() {
                return Ok(T::zero());
            }
            if pivot != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(pivot, j)];
                    a[(pivot, j)] = tmp;
                }
                det = -det;
            }
            det = det * a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                for j in k..n {
                    let sub = f * a[(k, j)];
                    a[(i, j)] = a[(i, j)] - sub;
                }
            }
        }
        Ok(det)
    }

    /// 2-norm condition number `σ_max / σ_min`; infinite when singular.
    pub fn condition_number(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::dims("square matrix", format!("{}x{}", self.rows, self.cols)));
        }
        let gram = SymMatrix::from_fn(self.cols, |i, j| {
            (0..self.rows).map(|k| self[(k, i)] * self[(k, j)]).sum::<T>()
        });
        let eig = sym_eigen(&gram);
        let hi = eig.values[0];
        let lo = eig.values[eig.values.len() - 1];
        if lo <= T::zero() {
            return Ok(T::infinity());
        }
        Ok((hi / lo).sqrt())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Square matrix that is exactly symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T>(Matrix<T>);

impl<T: Scalar> SymMatrix<T> {
    /// Evaluates `f` on the upper triangle and mirrors it.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix(m)
    }

    /// Accepts `m` only if it is square, finite and exactly symmetric.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dims("square matrix", format!("{}x{}", m.rows, m.cols)));
        }
        if m.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        for i in 0..m.rows {
            for j in i + 1..m.cols {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::invalid(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SymMatrix(m))
    }

    /// `(M + Mᵀ)/2`.
    pub fn symmetrize(m: &Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dims("square matrix", format!("{}x{}", m.rows, m.cols)));
        }
        let half = T::lit(0.5);
        Ok(Self::from_fn(m.rows, |i, j| half * (m[(i, j)] + m[(j, i)])))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n))
    }

    pub fn diagonal(values: &[T]) -> Self {
        SymMatrix(Matrix::diagonal(values))
    }

    pub fn order(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn scale(&self, alpha: T) -> Self {
        SymMatrix(self.0.scale(alpha))
    }

    /// `self + beta·other`.
    pub fn add_scaled(&self, beta: T, other: &SymMatrix<T>) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::dims(format!("order {}", self.order()), format!("{}", other.order())));
        }
        Ok(Self::from_fn(self.order(), |i, j| self[(i, j)] + beta * other[(i, j)]))
    }

    pub fn trace(&self) -> T {
        (0..self.order()).map(|i| self[(i, i)]).sum()
    }

    /// `vᵀ·M·v`.
    pub fn quadratic_form(&self, v: &[T]) -> T {
        dot(v, &self.0.mul_vec(v))
    }

    /// `uᵀ·M·v`.
    pub fn bilinear_form(&self, u: &[T], v: &[T]) -> T {
        dot(u, &self.0.mul_vec(v))
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        self.0.mul_vec(v)
    }

    pub fn max_abs(&self) -> T {
        self.0.max_abs()
    }

    pub fn frobenius_norm(&self) -> T {
        self.0.frobenius_norm()
    }
}

impl<T> Index<(usize, usize)> for SymMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, idx: (usize, usize)) -> &T {
        &self.0[idx]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Flips `v` so that its largest-magnitude entry is positive (first index wins ties).
pub(crate) fn canonical_sign<T: Scalar>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < T::zero()) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
