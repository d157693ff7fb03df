use super::{canonical_sign, Matrix, SymMatrix};
use crate::scalar::Scalar;

/// Hard cap on cyclic Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen<T> {
    /// Eigenvalues in descending order.
    pub values: Vec<T>,
    /// Row `i` is the unit eigenvector for `values[i]`, sign-normalized so
    /// its largest-magnitude entry is positive.
    pub vectors: Matrix<T>,
    pub sweeps: usize,
    pub converged: bool,
}

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps over every off-diagonal pair, annihilating each with a plane
/// rotation, until the off-diagonal Frobenius norm drops below
/// `T::jacobi_tolerance()·‖M‖_F` or [`MAX_SWEEPS`] is reached. Equal
/// eigenvalues keep the order in which the rotations left them.
pub fn sym_eigen<T: Scalar>(m: &SymMatrix<T>) -> SymEigen<T> {
    let n = m.order();
    let mut a = m.as_matrix().clone();
    let mut v = Matrix::<T>::identity(n);
    let norm = a.frobenius_norm();
    let threshold = T::jacobi_tolerance() * norm;
    let two = T::lit(2.0);

    let mut sweeps = 0;
    let mut converged = false;
    while sweeps <= MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        if sweeps == MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(T::one()));
                let c = T::one() / t.hypot(T::one());
                let s = t * c;

                a[(p, p)] = a[(p, p)] - t * apq;
                a[(q, q)] = a[(q, q)] + t * apq;
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        let new_rp = c * arp - s * arq;
                        let new_rq = s * arp + c * arq;
                        a[(r, p)] = new_rp;
                        a[(p, r)] = new_rp;
                        a[(r, q)] = new_rq;
                        a[(q, r)] = new_rq;
                    }
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep rotation order
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap());

    let values = order.iter().map(|&k| a[(k, k)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (row, &k) in order.iter().enumerate() {
        let dst = vectors.row_mut(row);
        for (r, d) in dst.iter_mut().enumerate() {
            *d = v[(r, k)];
        }
        canonical_sign(dst);
    }

    SymEigen {
        values,
        vectors,
        sweeps,
        converged,
    }
}

fn off_diagonal_norm<T: Scalar>(a: &Matrix<T>) -> T {
    let n = a.rows();
    let mut sum = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum = sum + a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}
