use super::{canonical_sign, cholesky, norm2, sym_eigen, Matrix, SymMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Solution of the symmetric-definite pencil `C·v = λ·C̄·v`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenEigenResult<T> {
    /// Descending.
    pub eigenvalues: Vec<T>,
    /// Row `i` pairs with `eigenvalues[i]`; rows are `C̄`-orthonormal.
    pub eigenvectors: Matrix<T>,
    /// `‖C·vᵢ − λᵢ·C̄·vᵢ‖₂`.
    pub residual_norms: Vec<T>,
    pub converged: bool,
}

/// Solves `C·v = λ·C̄·v` for symmetric `C` and symmetric positive definite `C̄`.
///
/// Factors `C̄ = L·Lᵀ`, diagonalizes the congruent matrix `L⁻¹·C·L⁻ᵀ` with
/// Jacobi rotations and maps each eigenvector back through `v = L⁻ᵀ·u`.
/// Eigenvalues are the extremal values of the generalized Rayleigh quotient
/// `vᵀCv / vᵀC̄v`, largest first.
pub fn generalized_eigen<T: Scalar>(c: &SymMatrix<T>, cbar: &SymMatrix<T>) -> Result<GenEigenResult<T>> {
    let n = c.order();
    if cbar.order() != n {
        return Err(Error::dims(format!("order {n}"), format!("{}", cbar.order())));
    }
    let chol = cholesky(cbar)?;

    // X = L⁻¹·C column by column, then M = L⁻¹·Xᵀ = L⁻¹·C·L⁻ᵀ.
    let mut x = Matrix::zeros(n, n);
    for j in 0..n {
        let col: Vec<T> = (0..n).map(|i| c[(i, j)]).collect();
        for (i, v) in chol.solve_lower(&col).into_iter().enumerate() {
            x[(i, j)] = v;
        }
    }
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        let col = x.row(j).to_vec();
        for (i, v) in chol.solve_lower(&col).into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    let reduced = SymMatrix::symmetrize(&m)?;
    let eig = sym_eigen(&reduced);

    let mut eigenvectors = Matrix::zeros(n, n);
    let mut residual_norms = Vec::with_capacity(n);
    for k in 0..n {
        let mut v = chol.solve_upper_transposed(eig.vectors.row(k));
        canonical_sign(&mut v);
        let lambda = eig.values[k];
        let cv = c.mul_vec(&v);
        let bv = cbar.mul_vec(&v);
        let r: Vec<T> = cv.iter().zip(&bv).map(|(&a, &b)| a - lambda * b).collect();
        residual_norms.push(norm2(&r));
        eigenvectors.row_mut(k).copy_from_slice(&v);
    }

    Ok(GenEigenResult {
        eigenvalues: eig.values,
        eigenvectors,
        residual_norms,
        converged: eig.converged,
    })
}
