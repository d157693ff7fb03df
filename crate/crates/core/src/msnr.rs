//! Closed-form maximum-SNR demixing.
//!
//! Each output `yᵢ = wᵢ·x` is scored by how much of its power survives a
//! causal moving average: `Fᵢ = 10·log₁₀(wᵢCwᵢᵀ / wᵢC̄wᵢᵀ)` with
//! `C = x·xᵀ/N` and `C̄ = (x̄−x)(x̄−x)ᵀ/N`. Setting the gradient to zero gives
//! the pencil `C·w = λ·C̄·w`; the demixing rows are its eigenvectors, ordered
//! by decreasing `λ`. No iteration over `W` is involved.

use crate::error::{Error, Result};
use crate::linalg::{generalized_eigen, Matrix, SymMatrix};
use crate::scalar::Scalar;
use crate::signal::SignalMatrix;

/// Relative ridge added to `C̄` when its Cholesky factorization fails.
pub const RIDGE_EPSILON: f64 = 1e-10;

/// Length `L ≥ 2` of the causal moving-average window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MovingAverageSpec(usize);

impl MovingAverageSpec {
    pub fn new(length: usize) -> Result<Self> {
        if length < 2 {
            return Err(Error::invalid(format!(
                "moving-average length must be at least 2 (got {length})"
            )));
        }
        Ok(Self(length))
    }

    pub fn length(&self) -> usize {
        self.0
    }

    fn check_fits(&self, n_samples: usize) -> Result<()> {
        if self.0 > n_samples {
            return Err(Error::invalid(format!(
                "moving-average length {} exceeds sample count {n_samples}",
                self.0
            )));
        }
        Ok(())
    }
}

/// Result of [`solve_demixing`].
#[derive(Debug, Clone, PartialEq)]
pub struct DemixingSolution<T> {
    /// Row `i` extracts output `i`.
    pub demixing: Matrix<T>,
    /// `λᵢ = Vᵢ/Uᵢ`, descending.
    pub eigenvalues: Vec<T>,
    pub ma_length: MovingAverageSpec,
    /// `10·log₁₀(λᵢ)`.
    pub objective_db: Vec<T>,
    pub residual_norms: Vec<T>,
    /// Set when `C̄` needed the ridge retry.
    pub ridge_applied: bool,
}

impl<T: Scalar> DemixingSolution<T> {
    /// `λ₁/λ₂`, or `None` for a single channel.
    pub fn eigen_gap(&self) -> Option<T> {
        match self.eigenvalues.as_slice() {
            [a, b, ..] => Some(*a / *b),
            _ => None,
        }
    }
}

/// `x̄ − x` per channel, with `x̄` the shrinking causal moving average.
///
/// Computed as the mean of `x(n−j) − x(n)` so constant stretches give exact zeros.
fn averaged_difference<T: Scalar>(x: &SignalMatrix<T>, spec: MovingAverageSpec) -> Vec<T> {
    let len = spec.length();
    let mut out = Vec::with_capacity(x.as_slice().len());
    for ch in x.channels() {
        for (n, &cur) in ch.iter().enumerate() {
            let w = len.min(n + 1);
            let acc: T = ch[n + 1 - w..=n].iter().map(|&v| v - cur).sum();
            out.push(acc / T::from_count(w));
        }
    }
    out
}

/// Causal moving average `x̄ᵢ(n) = (1/w)·Σ_{j<w} xᵢ(n−j)`, `w = min(L, n+1)`.
pub fn moving_average<T: Scalar>(x: &SignalMatrix<T>, spec: MovingAverageSpec) -> Result<SignalMatrix<T>> {
    spec.check_fits(x.n_samples())?;
    let diff = averaged_difference(x, spec);
    let data = x.as_slice().iter().zip(diff).map(|(&v, d)| v + d).collect();
    SignalMatrix::from_flat(x.n_channels(), x.n_samples(), data)
}

fn gram<T: Scalar>(data: &[T], n_channels: usize, n_samples: usize) -> SymMatrix<T> {
    let norm = T::from_count(n_samples);
    SymMatrix::from_fn(n_channels, |i, j| {
        let a = &data[i * n_samples..(i + 1) * n_samples];
        let b = &data[j * n_samples..(j + 1) * n_samples];
        a.iter().zip(b).map(|(&u, &v)| u * v).sum::<T>() / norm
    })
}

/// `C = x·xᵀ/N` and `C̄ = (x̄−x)(x̄−x)ᵀ/N`.
pub fn correlation_matrices<T: Scalar>(
    x: &SignalMatrix<T>,
    spec: MovingAverageSpec,
) -> Result<(SymMatrix<T>, SymMatrix<T>)> {
    spec.check_fits(x.n_samples())?;
    let (n, len) = (x.n_channels(), x.n_samples());
    let diff = averaged_difference(x, spec);
    Ok((gram(x.as_slice(), n, len), gram(&diff, n, len)))
}

fn row_ratios<T: Scalar>(
    w: &Matrix<T>,
    c: &SymMatrix<T>,
    cbar: &SymMatrix<T>,
) -> Result<Vec<(T, T)>> {
    let n = c.order();
    if w.cols() != n || cbar.order() != n {
        return Err(Error::dims(
            format!("rows of length {n} and C̄ of order {n}"),
            format!("W {}x{}, C̄ order {}", w.rows(), w.cols(), cbar.order()),
        ));
    }
    (0..w.rows())
        .map(|i| {
            let row = w.row(i);
            let u = cbar.quadratic_form(row);
            if u <= T::zero() || u.is_nan() {
                return Err(Error::DegenerateDenominator { row: i });
            }
            Ok((c.quadratic_form(row), u))
        })
        .collect()
}

/// Per-row contrast `fᵢ = 10·log₁₀(wᵢCwᵢᵀ / wᵢC̄wᵢᵀ)` in dB.
pub fn objective<T: Scalar>(w: &Matrix<T>, c: &SymMatrix<T>, cbar: &SymMatrix<T>) -> Result<Vec<T>> {
    Ok(row_ratios(w, c, cbar)?
        .into_iter()
        .map(|(v, u)| T::lit(10.0) * (v / u).log10())
        .collect())
}

/// Row-wise gradient of [`objective`]: `gᵢ = (20/ln 10)·(C·wᵢ/Vᵢ − C̄·wᵢ/Uᵢ)`.
pub fn objective_gradient<T: Scalar>(
    w: &Matrix<T>,
    c: &SymMatrix<T>,
    cbar: &SymMatrix<T>,
) -> Result<Matrix<T>> {
    let ratios = row_ratios(w, c, cbar)?;
    let kappa = T::lit(20.0 / std::f64::consts::LN_10);
    let mut g = Matrix::zeros(w.rows(), w.cols());
    for (i, (v, u)) in ratios.into_iter().enumerate() {
        let cw = c.mul_vec(w.row(i));
        let bw = cbar.mul_vec(w.row(i));
        for (k, out) in g.row_mut(i).iter_mut().enumerate() {
            *out = kappa * (cw[k] / v - bw[k] / u);
        }
    }
    Ok(g)
}

/// Solves for the demixing matrix of `x` in closed form.
///
/// If `C̄` is not numerically positive definite, one retry is made with
/// `C̄ + ε·tr(C̄)/n·I`, `ε = RIDGE_EPSILON`.
pub fn solve_demixing<T: Scalar>(x: &SignalMatrix<T>, spec: MovingAverageSpec) -> Result<DemixingSolution<T>> {
    let n = x.n_channels();
    let need = spec.length().max(10 * n);
    if x.n_samples() < need {
        return Err(Error::invalid(format!(
            "need at least {need} samples for {n} channels at L = {}, got {}",
            spec.length(),
            x.n_samples()
        )));
    }
    let (c, cbar) = correlation_matrices(x, spec)?;

    let (gen, ridge_applied) = match generalized_eigen(&c, &cbar) {
        Ok(r) => (r, false),
        Err(Error::NotPositiveDefinite { .. }) => {
            let shift = T::lit(RIDGE_EPSILON) * cbar.trace() / T::from_count(n);
            let ridged = cbar
                .add_scaled(T::one(), &SymMatrix::identity(n).scale(shift))?;
            match generalized_eigen(&c, &ridged) {
                Ok(r) => {
                    log::debug!("ridge {shift} added to averaged-difference covariance");
                    (r, true)
                }
                Err(Error::NotPositiveDefinite { .. }) => return Err(Error::SingularAveragedCovariance),
                Err(e) => return Err(e),
            }
        }
        Err(e) => return Err(e),
    };

    let objective_db = gen.eigenvalues.iter().map(|&l| T::lit(10.0) * l.log10()).collect();
    Ok(DemixingSolution {
        demixing: gen.eigenvectors,
        eigenvalues: gen.eigenvalues,
        ma_length: spec,
        objective_db,
        residual_norms: gen.residual_norms,
        ridge_applied,
    })
}

/// `y = W·x`.
pub fn apply_demixing<T: Scalar>(w: &Matrix<T>, x: &SignalMatrix<T>) -> Result<SignalMatrix<T>> {
    if !w.is_square() || w.cols() != x.n_channels() {
        return Err(Error::dims(
            format!("{0}x{0} demixing matrix", x.n_channels()),
            format!("{}x{}", w.rows(), w.cols()),
        ));
    }
    x.transform(w)
}
