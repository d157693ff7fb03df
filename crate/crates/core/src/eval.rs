//! Separation quality: correlation coefficient and permutation/sign alignment.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::signal::SignalMatrix;

/// Largest channel count for which [`align`] enumerates permutations.
pub const MAX_ALIGN_CHANNELS: usize = 8;

/// Pearson correlation `cov(a,b) / (√cov(a,a)·√cov(b,b))` with mean removal.
pub fn corrcoef<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::dims(format!("{} samples", a.len()), format!("{}", b.len())));
    }
    if a.len() < 2 {
        return Err(Error::invalid("correlation needs at least two samples"));
    }
    let n = T::from_count(a.len());
    let ma = a.iter().copied().sum::<T>() / n;
    let mb = b.iter().copied().sum::<T>() / n;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab = sab + dx * dy;
        saa = saa + dx * dx;
        sbb = sbb + dy * dy;
    }
    if saa == T::zero() || sbb == T::zero() {
        return Err(Error::ConstantSignal);
    }
    // √saa·√sbb rather than √(saa·sbb) keeps the expression symmetric in a, b
    let r = sab / (saa.sqrt() * sbb.sqrt());
    Ok(r.max(-T::one()).min(T::one()))
}

/// Source/output matching after resolving order and sign.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentReport<T> {
    /// Entry `(i, j)` is `corrcoef(sourceᵢ, outputⱼ)`.
    pub corr_matrix: Matrix<T>,
    /// Source `i` is matched to output `assignment[i]`.
    pub assignment: Vec<usize>,
    pub per_source_corr: Vec<T>,
    pub mean_corr: T,
}

/// Matches every source to a distinct output, maximizing the summed absolute
/// correlation over all `n!` permutations.
///
/// The first maximizing permutation in lexicographic order wins ties.
pub fn align<T: Scalar>(sources: &SignalMatrix<T>, outputs: &SignalMatrix<T>) -> Result<AlignmentReport<T>> {
    let n = sources.n_channels();
    if outputs.n_channels() != n || outputs.n_samples() != sources.n_samples() {
        return Err(Error::dims(
            format!("{}x{}", n, sources.n_samples()),
            format!("{}x{}", outputs.n_channels(), outputs.n_samples()),
        ));
    }
    if n > MAX_ALIGN_CHANNELS {
        return Err(Error::invalid(format!(
            "alignment supports at most {MAX_ALIGN_CHANNELS} channels, got {n}"
        )));
    }
    let mut corr_matrix = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            corr_matrix[(i, j)] = corrcoef(sources.channel(i), outputs.channel(j))?;
        }
    }

    let score = |p: &[usize]| -> T { p.iter().enumerate().map(|(i, &j)| corr_matrix[(i, j)].abs()).sum() };
    let mut best: Vec<usize> = (0..n).collect();
    let mut best_score = score(&best);
    for perm in (0..n).permutations(n) {
        let s = score(&perm);
        if s > best_score {
            best_score = s;
            best = perm;
        }
    }

    let per_source_corr: Vec<T> = best.iter().enumerate().map(|(i, &j)| corr_matrix[(i, j)].abs()).collect();
    let mean_corr = per_source_corr.iter().copied().sum::<T>() / T::from_count(n);
    Ok(AlignmentReport {
        corr_matrix,
        assignment: best,
        per_source_corr,
        mean_corr,
    })
}
