//! Multichannel sampled signals.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// `n_channels × n_samples` block of real samples, stored channel-major.
///
/// Every channel has the same length and every sample is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix<T> {
    n_channels: usize,
    n_samples: usize,
    data: Vec<T>,
}

impl<T: Scalar> SignalMatrix<T> {
    /// Builds a signal matrix from one `Vec` per channel.
    pub fn from_channels(channels: Vec<Vec<T>>) -> Result<Self> {
        let n_channels = channels.len();
        if n_channels == 0 {
            return Err(Error::invalid("signal needs at least one channel"));
        }
        let n_samples = channels[0].len();
        if n_samples == 0 {
            return Err(Error::NoSamples);
        }
        let mut data = Vec::with_capacity(n_channels * n_samples);
        for (i, ch) in channels.into_iter().enumerate() {
            if ch.len() != n_samples {
                return Err(Error::dims(
                    format!("{n_samples} samples in channel {i}"),
                    format!("{}", ch.len()),
                ));
            }
            data.extend(ch);
        }
        Self::from_flat(n_channels, n_samples, data)
    }

    /// Builds a signal matrix from channel-major flat storage.
    pub fn from_flat(n_channels: usize, n_samples: usize, data: Vec<T>) -> Result<Self> {
        if n_channels == 0 {
            return Err(Error::invalid("signal needs at least one channel"));
        }
        if n_samples == 0 {
            return Err(Error::NoSamples);
        }
        if data.len() != n_channels * n_samples {
            return Err(Error::dims(
                format!("{} values", n_channels * n_samples),
                format!("{}", data.len()),
            ));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite sample at channel {}, index {}",
                pos / n_samples,
                pos % n_samples
            )));
        }
        Ok(Self {
            n_channels,
            n_samples,
            data,
        })
    }

    pub fn single(channel: Vec<T>) -> Result<Self> {
        Self::from_channels(vec![channel])
    }

    /// Stacks the channels of several matrices with equal sample counts.
    pub fn stack(parts: &[SignalMatrix<T>]) -> Result<Self> {
        let channels = parts
            .iter()
            .flat_map(|p| p.channels().map(<[T]>::to_vec))
            .collect();
        Self::from_channels(channels)
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn channel(&self, i: usize) -> &[T] {
        &self.data[i * self.n_samples..(i + 1) * self.n_samples]
    }

    pub fn channels(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.n_samples)
    }

    pub fn get(&self, channel: usize, sample: usize) -> T {
        self.data[channel * self.n_samples + sample]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Mean square of each channel.
    pub fn channel_powers(&self) -> Vec<T> {
        let n = T::from_count(self.n_samples);
        self.channels()
            .map(|ch| ch.iter().map(|&v| v * v).sum::<T>() / n)
            .collect()
    }

    /// Left-multiplies by `m`: output channel `i` is `Σ_j m[i][j]·self[j]`.
    pub fn transform(&self, m: &Matrix<T>) -> Result<Self> {
        if m.cols() != self.n_channels {
            return Err(Error::dims(
                format!("matrix with {} columns", self.n_channels),
                format!("{}x{}", m.rows(), m.cols()),
            ));
        }
        let mut data = vec![T::zero(); m.rows() * self.n_samples];
        for (i, out) in data.chunks_exact_mut(self.n_samples).enumerate() {
            for (j, ch) in self.channels().enumerate() {
                let w = m[(i, j)];
                if w == T::zero() {
                    continue;
                }
                for (o, &v) in out.iter_mut().zip(ch) {
                    *o = *o + w * v;
                }
            }
        }
        Self::from_flat(m.rows(), self.n_samples, data)
    }

    /// Elementwise sum of two equally shaped signals.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_channels != other.n_channels || self.n_samples != other.n_samples {
            return Err(Error::dims(
                format!("{}x{}", self.n_channels, self.n_samples),
                format!("{}x{}", other.n_channels, other.n_samples),
            ));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Self::from_flat(self.n_channels, self.n_samples, data)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::from_flat(
            self.n_channels,
            self.n_samples,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_empty() {
        assert!(SignalMatrix::<f64>::from_channels(vec![]).is_err());
        assert!(matches!(
            SignalMatrix::<f64>::from_channels(vec![vec![]]),
            Err(Error::NoSamples)
        ));
        assert!(SignalMatrix::from_channels(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(SignalMatrix::single(vec![1.0, f64::NAN]).is_err());
        assert!(SignalMatrix::single(vec![f32::INFINITY]).is_err());
    }

    #[test]
    fn transform_applies_rows() {
        let s = SignalMatrix::from_channels(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
        let y = s.transform(&m).unwrap();
        assert_eq!(y.channel(0), &[3.0, 4.0]);
        assert_eq!(y.channel(1), &[-1.0, 0.0]);
    }

    #[test]
    fn powers_are_mean_squares() {
        let s = SignalMatrix::from_channels(vec![vec![1.0, -1.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(s.channel_powers(), vec![1.0, 2.0]);
    }
}
