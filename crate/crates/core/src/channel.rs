//! Noisy instantaneous mixing `x = A·(s + v)`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::signal::SignalMatrix;

/// Largest condition number accepted for a randomly drawn mixing matrix.
pub const MAX_RANDOM_CONDITION: f64 = 100.0;

/// Per-source signal-to-noise setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr {
    /// Noise is not injected at all.
    Noiseless,
    Db(f64),
}

impl Snr {
    /// `+∞` maps to [`Snr::Noiseless`].
    pub fn from_db(db: f64) -> Self {
        if db == f64::INFINITY {
            Snr::Noiseless
        } else {
            Snr::Db(db)
        }
    }

    /// Noise-to-signal power ratio `10^(−dB/10)`, zero when noiseless.
    pub fn noise_power_ratio(&self) -> f64 {
        match *self {
            Snr::Noiseless => 0.0,
            Snr::Db(db) => 10f64.powf(-db / 10.0),
        }
    }
}

impl fmt::Display for Snr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Snr::Noiseless => f.write_str("noiseless"),
            Snr::Db(db) => write!(f, "{db}"),
        }
    }
}

impl Serialize for Snr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Snr::Noiseless => s.serialize_str("noiseless"),
            Snr::Db(db) => s.serialize_f64(*db),
        }
    }
}

impl<'de> Deserialize<'de> for Snr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Db(f64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Db(db) if db.is_nan() => Err(serde::de::Error::custom("SNR must not be NaN")),
            Raw::Db(db) => Ok(Snr::from_db(db)),
            Raw::Word(w) if w == "noiseless" || w == "inf" => Ok(Snr::Noiseless),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected a dB value or \"noiseless\", got {w:?}"
            ))),
        }
    }
}

/// Mixing matrix, SNR and noise seed for one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec<T> {
    mixing: Matrix<T>,
    snr: Snr,
    seed: u64,
}

impl<T: Scalar> ChannelSpec<T> {
    /// Validates that `mixing` is square and finite. A (near-)singular matrix
    /// is accepted with a warning since the mixture is then not separable.
    pub fn new(mixing: Matrix<T>, snr: Snr, seed: u64) -> Result<Self> {
        if !mixing.is_square() {
            return Err(Error::dims(
                "square mixing matrix",
                format!("{}x{}", mixing.rows(), mixing.cols()),
            ));
        }
        if mixing.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("mixing matrix entries must be finite"));
        }
        let det = mixing.determinant()?;
        let scale = mixing.max_abs().powi(mixing.rows() as i32);
        if det.abs() <= T::lit(1e-12) * scale {
            log::warn!("mixing matrix is numerically singular (det = {det}); sources are not separable");
        }
        Ok(Self { mixing, snr, seed })
    }

    /// Matrix `[0.4684 0.1952; 0.7384 0.5483]` used by the demo.
    pub fn demo_matrix() -> Matrix<T> {
        Matrix::from_rows(&[
            vec![T::lit(0.4684), T::lit(0.1952)],
            vec![T::lit(0.7384), T::lit(0.5483)],
        ])
        .unwrap()
    }

    pub fn mixing(&self) -> &Matrix<T> {
        &self.mixing
    }

    pub fn snr(&self) -> Snr {
        self.snr
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Adds white Gaussian noise to every channel at the requested per-channel SNR.
///
/// Channel `i` receives i.i.d. `N(0, Pᵢ·10^(−snr/10))` samples where `Pᵢ` is
/// its own mean-square power. Channels draw sequentially from one ChaCha8
/// stream seeded with `seed`.
pub fn add_awgn<T: Scalar>(s: &SignalMatrix<T>, snr: Snr, seed: u64) -> Result<SignalMatrix<T>> {
    if snr == Snr::Noiseless {
        return Ok(s.clone());
    }
    let ratio = snr.noise_power_ratio();
    let powers = s.channel_powers();
    if let Some(channel) = powers.iter().position(|p| *p <= T::zero()) {
        return Err(Error::ZeroPowerChannel { channel });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(s.as_slice().len());
    for (ch, p) in s.channels().zip(powers) {
        let sigma = (p.as_f64() * ratio).sqrt();
        data.extend(ch.iter().map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            v + T::lit(sigma * z)
        }));
    }
    SignalMatrix::from_flat(s.n_channels(), s.n_samples(), data)
}

/// `x = A·(s + v)`: noise is injected at the sources, then mixed.
pub fn mix<T: Scalar>(spec: &ChannelSpec<T>, s: &SignalMatrix<T>) -> Result<SignalMatrix<T>> {
    if spec.mixing.cols() != s.n_channels() {
        return Err(Error::dims(
            format!("{} source channels", spec.mixing.cols()),
            format!("{}", s.n_channels()),
        ));
    }
    add_awgn(s, spec.snr, spec.seed)?.transform(&spec.mixing)
}

/// Draws an `n×n` matrix with i.i.d. uniform(0,1) entries, redrawing until
/// its condition number is at most [`MAX_RANDOM_CONDITION`].
pub fn random_mixing_matrix<T: Scalar>(n: usize, rng: &mut impl Rng) -> Matrix<T> {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| T::lit(rng.random::<f64>()));
        if m
            .condition_number()
            .is_ok_and(|k| k.as_f64() <= MAX_RANDOM_CONDITION)
        {
            return m;
        }
    }
}
