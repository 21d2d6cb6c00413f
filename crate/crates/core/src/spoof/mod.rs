//! Spoofed pilot designs.
//!
//! All designs solve `H (.) X = H_target` (or an approximation of it) for the pilot `X`, so
//! that a receiver which assumes the nominal all-ones pilot observes a channel generated by
//! fictitious parameters. The [`oracle`] designs know the true complex path gains, the
//! [`blind`] designs only know delays and angles.

pub mod blind;
pub mod oracle;

pub use blind::{
    blind_impossibility_certificate, blind_kronecker_pilot, blind_multipath_angle_pilot, blind_single_path_pilot,
    design_blind_full, fake_path_pilot, AlternatingConfig, AlternatingResult, BlindDesign, BlindMode,
    ImpossibilityCertificate, FakePathPlan,
};
pub use oracle::{
    design_full_pilot_tensor, design_joint_angle_pilot, design_subspace_pilot, spoof_residual, SpoofDesign,
    SpoofResidual, SpoofTarget, SubspacePilot,
};

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Denominators below this fraction of the largest one are treated as zero.
pub const RELATIVE_ZERO: f64 = 1e-12;

/// Entry-wise `num / den`, failing on the first denominator that is negligible relative to
/// the largest one. `index` maps a flat position to the reported tensor index.
pub(crate) fn checked_ratio(
    num: &[Complex64],
    den: &[Complex64],
    index: impl Fn(usize) -> [usize; 3],
) -> Result<Vec<Complex64>> {
    debug_assert_eq!(num.len(), den.len());
    let max = den.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let floor = RELATIVE_ZERO * max;
    num.iter()
        .zip(den)
        .enumerate()
        .map(|(i, (n, d))| {
            let modulus = d.norm();
            if modulus <= floor || !modulus.is_finite() {
                Err(Error::ZeroDenominator { index: index(i), modulus })
            } else {
                Ok(n / d)
            }
        })
        .collect()
}
