//! Bit streams and QPSK/OOK waveform synthesis for the source signals.
//!
//! QPSK is a real passband cosine with an integer number of carrier cycles
//! per symbol and rectangular pulses. OOK is baseband unipolar NRZ, the
//! natural form for intensity-modulated optical links.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::signal::SignalMatrix;

/// First demo stream (QPSK source).
pub const DEMO_BITS_QPSK: &str = "00011010010111101001";
/// Second demo stream (OOK source). The listed stream has 19 bits; a
/// trailing `0` is appended so that 20 bits × 100 samples gives 2000 samples.
pub const DEMO_BITS_OOK: &str = "00000001100110001010";

/// Non-empty sequence of bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::invalid("bit vector must contain at least one bit"));
        }
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(Error::invalid(format!("bit {i} is {} (expected 0 or 1)", bits[i])));
        }
        Ok(Self(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }
}

/// Parses strings such as `"0110"` or `"0 1 1 0"`; whitespace is ignored.
impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::invalid(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|b| write!(f, "{b}"))
    }
}

/// Draws `count` independent fair bits from a ChaCha8 stream seeded with `seed`.
pub fn random_bits(count: usize, seed: u64) -> Result<BitVector> {
    if count == 0 {
        return Err(Error::invalid("bit count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BitVector::new((0..count).map(|_| u8::from(rng.random::<bool>())).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Qpsk,
    Ook,
}

impl FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" => Ok(Modulation::Qpsk),
            "ook" => Ok(Modulation::Ook),
            other => Err(Error::invalid(format!("unknown modulation {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationSpec<T> {
    scheme: Modulation,
    samples_per_symbol: usize,
    carrier_cycles_per_symbol: u32,
    amplitude: T,
}

impl<T: Scalar> ModulationSpec<T> {
    pub fn new(
        scheme: Modulation,
        samples_per_symbol: usize,
        carrier_cycles_per_symbol: u32,
        amplitude: T,
    ) -> Result<Self> {
        if samples_per_symbol == 0 {
            return Err(Error::invalid("samples per symbol must be at least 1"));
        }
        if scheme == Modulation::Qpsk && carrier_cycles_per_symbol == 0 {
            return Err(Error::invalid("QPSK needs at least one carrier cycle per symbol"));
        }
        if amplitude <= T::zero() || !amplitude.is_finite() {
            return Err(Error::invalid("amplitude must be positive and finite"));
        }
        Ok(Self {
            scheme,
            samples_per_symbol,
            carrier_cycles_per_symbol,
            amplitude,
        })
    }

    /// 200 samples and 4 carrier cycles per symbol, unit amplitude.
    pub fn default_qpsk() -> Self {
        Self::new(Modulation::Qpsk, 200, 4, T::one()).unwrap()
    }

    /// 100 samples per bit, unit amplitude.
    pub fn default_ook() -> Self {
        Self::new(Modulation::Ook, 100, 0, T::one()).unwrap()
    }

    pub fn scheme(&self) -> Modulation {
        self.scheme
    }

    pub fn samples_per_symbol(&self) -> usize {
        self.samples_per_symbol
    }

    pub fn carrier_cycles_per_symbol(&self) -> u32 {
        self.carrier_cycles_per_symbol
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    /// Number of samples produced for `n_bits` input bits.
    pub fn output_len(&self, n_bits: usize) -> usize {
        match self.scheme {
            Modulation::Qpsk => n_bits / 2 * self.samples_per_symbol,
            Modulation::Ook => n_bits * self.samples_per_symbol,
        }
    }
}

/// Gray-coded carrier phase for a bit pair, in units of π/4.
fn qpsk_phase_octants(b0: u8, b1: u8) -> u32 {
    match (b0, b1) {
        (0, 0) => 1,
        (0, 1) => 3,
        (1, 1) => 5,
        _ => 7,
    }
}

/// Real passband QPSK with rectangular pulses.
///
/// Sample `k` of symbol `m` is `A·cos(2π·cycles·k/sps + φₘ)` with the Gray map
/// `00→π/4, 01→3π/4, 11→5π/4, 10→7π/4`.
pub fn modulate_qpsk<T: Scalar>(bits: &BitVector, spec: &ModulationSpec<T>) -> Result<SignalMatrix<T>> {
    if spec.scheme != Modulation::Qpsk {
        return Err(Error::invalid("modulate_qpsk needs a QPSK spec"));
    }
    if !bits.len().is_multiple_of(2) {
        return Err(Error::OddBitCount(bits.len()));
    }
    let sps = spec.samples_per_symbol;
    let two_pi = T::lit(std::f64::consts::TAU);
    let quarter_pi = T::lit(std::f64::consts::FRAC_PI_4);
    let cycles = T::from_u32(spec.carrier_cycles_per_symbol).unwrap();
    let sps_t = T::from_count(sps);

    let mut out = Vec::with_capacity(spec.output_len(bits.len()));
    for pair in bits.as_slice().chunks_exact(2) {
        let phase = quarter_pi * T::from_u32(qpsk_phase_octants(pair[0], pair[1])).unwrap();
        out.extend((0..sps).map(|k| {
            spec.amplitude * (two_pi * cycles * T::from_count(k) / sps_t + phase).cos()
        }));
    }
    SignalMatrix::single(out)
}

/// Unipolar NRZ on-off keying: each bit `b` becomes `sps` samples of `A·b`.
pub fn modulate_ook<T: Scalar>(bits: &BitVector, spec: &ModulationSpec<T>) -> Result<SignalMatrix<T>> {
    if spec.scheme != Modulation::Ook {
        return Err(Error::invalid("modulate_ook needs an OOK spec"));
    }
    let out = bits
        .as_slice()
        .iter()
        .flat_map(|&b| {
            let level = if b == 1 { spec.amplitude } else { T::zero() };
            std::iter::repeat_n(level, spec.samples_per_symbol)
        })
        .collect();
    SignalMatrix::single(out)
}

/// Dispatches on `spec.scheme()`.
pub fn modulate<T: Scalar>(bits: &BitVector, spec: &ModulationSpec<T>) -> Result<SignalMatrix<T>> {
    match spec.scheme {
        Modulation::Qpsk => modulate_qpsk(bits, spec),
        Modulation::Ook => modulate_ook(bits, spec),
    }
}
