//! Blind source separation of noisy instantaneous mixtures by the closed-form
//! maximum-SNR method, with a QPSK/OOK optical-link simulator and an
//! experiment harness for sweeping the moving-average length and SNR.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the harness and CLI use.
//!
//! ```
//! use msnr_core::channel::{mix, ChannelSpec, Snr};
//! use msnr_core::eval::align;
//! use msnr_core::msnr::{apply_demixing, solve_demixing, MovingAverageSpec};
//! use msnr_core::siggen::{modulate_ook, modulate_qpsk, random_bits};
//! use msnr_core::{ModulationSpec, Signals};
//!
//! let s1 = modulate_qpsk(&random_bits(20, 1)?, &ModulationSpec::default_qpsk())?;
//! let s2 = modulate_ook(&random_bits(20, 2)?, &ModulationSpec::default_ook())?;
//! let sources = Signals::stack(&[s1, s2])?;
//!
//! let channel = ChannelSpec::new(ChannelSpec::demo_matrix(), Snr::Db(30.0), 7)?;
//! let mixtures = mix(&channel, &sources)?;
//!
//! let solution = solve_demixing(&mixtures, MovingAverageSpec::new(7)?)?;
//! let separated = apply_demixing(&solution.demixing, &mixtures)?;
//! assert!(align(&sources, &separated)?.mean_corr > 0.95);
//! # Ok::<(), msnr_core::Error>(())
//! ```

pub mod channel;
pub mod error;
pub mod eval;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod msnr;
pub mod scalar;
pub mod siggen;
pub mod signal;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use signal::SignalMatrix;

pub type Signals = signal::SignalMatrix<f64>;
pub type Signals32 = signal::SignalMatrix<f32>;
pub type Mat = linalg::Matrix<f64>;
pub type Sym = linalg::SymMatrix<f64>;
pub type ChannelSpec = channel::ChannelSpec<f64>;
pub type ModulationSpec = siggen::ModulationSpec<f64>;
pub type DemixingSolution = msnr::DemixingSolution<f64>;
pub type AlignmentReport = eval::AlignmentReport<f64>;
pub type GenEigenResult = linalg::GenEigenResult<f64>;
