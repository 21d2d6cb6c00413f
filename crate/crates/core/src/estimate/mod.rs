//! BS-side channel parameter estimation.
//!
//! [`flex_estimate`] is the main entry point: a delay periodogram with CA-CFAR detection,
//! per-path delay refinement and phase compensation, then shift-invariance (ESPRIT) angle
//! recovery in element space. Paths are extracted one at a time with successive
//! cancellation and then re-estimated against each other. The matched-filter spectra in
//! [`spectrum`] are the simple grid-search counterparts used for illustration.
//!
//! The estimator sees only the received tensor, the codebooks and the system config.

mod cfar;
mod esprit;
mod fft;
mod flex;
mod spectrum;

pub use cfar::{cfar_detect, cfar_threshold_factor, CfarConfig};
pub use esprit::{esprit_sine, EspritEstimate};
pub use flex::{flex_estimate, EstimatedPath, EstimationResult, FlexConfig};
pub use spectrum::{
    angle_grid, delay_periodogram, mf_angle_spectrum, mf_spectrum, tensor_angle_spectrum, tensor_delay_spectrum,
    AngleDomain, Spectrum,
};
