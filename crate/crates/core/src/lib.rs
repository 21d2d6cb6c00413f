//! Physical-layer location spoofing for single-anchor mmWave MIMO-OFDM positioning.
//!
//! The crate covers the whole signal chain of an uplink pilot exchange:
//!
//! * [`scenario`]: ground-truth 2D geometry and its map to path delays, angles and gains.
//! * [`channel`]: steering vectors, DFT beam codebooks and the order-3 channel tensor.
//! * [`spoof`]: pilot tensors that make the base station observe a fictitious geometry,
//!   both with known path gains (oracle) and without (blind).
//! * [`estimate`]: matched-filter spectra and a periodogram/CFAR/ESPRIT path estimator.
//! * [`locate`]: single-anchor positioning from two paths, beam selection and link rate.
//! * [`trial`]: one end-to-end Monte Carlo trial and the error metrics.
//!
//! The crate is `no_std` and needs only `alloc`. The default `std` feature swaps the
//! direct DFT used by the delay periodogram for an FFT.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod error;
pub mod estimate;
pub mod linalg;
pub mod locate;
pub mod rng;
pub mod scenario;
pub mod spoof;
pub mod tensor;
pub mod trial;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use tensor::Tensor3;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    num_traits::Float::powf(10f64, (dbm - 30.0) / 10.0)
}

/// Converts a ratio in dB (or dBi) to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    num_traits::Float::powf(10f64, db / 10.0)
}
