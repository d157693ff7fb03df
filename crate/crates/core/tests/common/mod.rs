#![allow(dead_code)]

use msnr_core::linalg::{Matrix, SymMatrix};
use rand::Rng;

/// `G·Gᵀ + shift·I` with `G` uniform in [-1, 1].
pub fn random_spd(n: usize, shift: f64, rng: &mut impl Rng) -> SymMatrix<f64> {
    let g = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    SymMatrix::from_fn(n, |i, j| {
        let v: f64 = (0..n).map(|k| g[(i, k)] * g[(j, k)]).sum();
        v + if i == j { shift } else { 0.0 }
    })
}

pub fn random_symmetric(n: usize, rng: &mut impl Rng) -> SymMatrix<f64> {
    SymMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_matrix(n: usize, rng: &mut impl Rng) -> Matrix<f64> {
    Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

pub fn quad(m: &SymMatrix<f64>, v: &[f64]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += v[i] * m[(i, j)] * v[j];
        }
    }
    s
}

pub fn rayleigh(c: &SymMatrix<f64>, cbar: &SymMatrix<f64>, v: &[f64]) -> f64 {
    quad(c, v) / quad(cbar, v)
}

/// Determinant by plain Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn det_oracle(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}
