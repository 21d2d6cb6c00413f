//! Closed-form spoofing with known path gains.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;

use nalgebra::DVector;
use num_complex::Complex64;

use super::checked_ratio;
use crate::channel::{channel_tensor, Codebooks, PilotTensor, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scenario::{forward_params, path_gain_magnitudes, GainModelConfig, PathParameterSet, ScenarioGeometry};
use crate::tensor::Tensor3;

/// The fictitious world a spoofing UE wants the BS to see.
#[derive(Debug, Clone, PartialEq)]
pub struct SpoofTarget {
    pub geometry: ScenarioGeometry,
    /// Target delays and angles, with the design gains `lambda` stored as path gains.
    pub params: PathParameterSet,
}

impl SpoofTarget {
    pub fn new(geometry: ScenarioGeometry, design_gains: &[Complex64]) -> Result<Self> {
        let params = forward_params(&geometry)?;
        if params.len() != design_gains.len() {
            return Err(Error::InvalidConfig(format!(
                "target has {} paths but {} design gains were given",
                params.len(),
                design_gains.len()
            )));
        }
        if design_gains.iter().all(|g| g.norm() == 0.0) {
            return Err(Error::InvalidConfig("design gains must not all be zero".into()));
        }
        Ok(Self { params: params.with_gains(design_gains), geometry })
    }

    /// Design gains that keep the true phases and take magnitudes from the target geometry's
    /// path loss, so the spoofed paths carry physically plausible powers. With the target
    /// equal to the truth this returns the true gains.
    pub fn with_plausible_gains(
        geometry: ScenarioGeometry,
        true_gains: &[Complex64],
        gain_cfg: &GainModelConfig,
    ) -> Result<Self> {
        let mags = path_gain_magnitudes(&geometry, gain_cfg)?;
        if mags.len() != true_gains.len() {
            return Err(Error::InvalidConfig(format!(
                "target has {} paths but the true channel has {}",
                mags.len(),
                true_gains.len()
            )));
        }
        let lambda: Vec<_> = true_gains
            .iter()
            .zip(&mags)
            .map(|(a, m)| {
                let n = a.norm();
                if n > 0.0 {
                    a * (m / n)
                } else {
                    Complex64::new(*m, 0.0)
                }
            })
            .collect();
        Self::new(geometry, &lambda)
    }

    pub fn design_gains(&self) -> Vec<Complex64> {
        self.params.gains()
    }
}

/// A pilot vector together with the factor applied to `lambda` to meet the energy budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspacePilot {
    pub pilot: Vec<Complex64>,
    pub lambda_scale: f64,
}

fn normalize(pilot: &mut [Complex64], budget: f64) -> f64 {
    let e: f64 = pilot.iter().map(|v| v.norm_sqr()).sum();
    if e == 0.0 {
        return 1.0;
    }
    let s = (budget / e).sqrt();
    pilot.iter_mut().for_each(|v| *v *= s);
    s
}

/// Single-factor design `x = (M_spoof lambda) / (M_true gains)`, rescaled to energy `N`.
///
/// The same routine spoofs angles of arrival (`B`), angles of departure (`C`) or delays (`D`).
pub fn design_subspace_pilot(
    m_true: &CMatrix,
    gains: &[Complex64],
    m_spoof: &CMatrix,
    lambda: &[Complex64],
) -> Result<SubspacePilot> {
    let n = m_true.nrows();
    if m_spoof.nrows() != n || m_true.ncols() != gains.len() || m_spoof.ncols() != lambda.len() {
        return Err(Error::DimensionMismatch {
            expected: [n, m_true.ncols(), lambda.len()],
            found: [m_spoof.nrows(), gains.len(), m_spoof.ncols()],
        });
    }
    let den = m_true * DVector::from_column_slice(gains);
    let num = m_spoof * DVector::from_column_slice(lambda);
    let mut pilot = checked_ratio(num.as_slice(), den.as_slice(), |i| [i, 0, 0])?;
    let lambda_scale = normalize(&mut pilot, n as f64);
    Ok(SubspacePilot { pilot, lambda_scale })
}

/// Joint AoA/AoD design `X = (B_s diag(lambda) C_s^T) / (B diag(alpha) C^T)` as an `M x S`
/// matrix, without energy normalization.
pub fn design_joint_angle_pilot(
    b: &CMatrix,
    c: &CMatrix,
    gains: &[Complex64],
    b_spoof: &CMatrix,
    c_spoof: &CMatrix,
    lambda: &[Complex64],
) -> Result<CMatrix> {
    let (m, s) = (b.nrows(), c.nrows());
    if b_spoof.nrows() != m || c_spoof.nrows() != s {
        return Err(Error::DimensionMismatch {
            expected: [m, s, 1],
            found: [b_spoof.nrows(), c_spoof.nrows(), 1],
        });
    }
    let den = b * CMatrix::from_diagonal(&DVector::from_column_slice(gains)) * c.transpose();
    let num = b_spoof * CMatrix::from_diagonal(&DVector::from_column_slice(lambda)) * c_spoof.transpose();
    // nalgebra storage is column-major: flat index i is (i % m, i / m).
    let ratio = checked_ratio(num.as_slice(), den.as_slice(), |i| [i % m, i / m, 0])?;
    Ok(CMatrix::from_column_slice(m, s, &ratio))
}

/// An energy-normalized spoofing pilot and the gains the BS will effectively observe.
#[derive(Debug, Clone, PartialEq)]
pub struct SpoofDesign {
    pub pilot: PilotTensor,
    /// Factor applied to the design gains by the energy normalization.
    pub lambda_scale: f64,
}

/// Full tensor design `X = H(target, lambda) / H(true, alpha)` normalized to `M S K`.
pub fn design_full_pilot_tensor(
    true_params: &PathParameterSet,
    target: &SpoofTarget,
    books: &Codebooks,
    cfg: &SystemConfig,
) -> Result<SpoofDesign> {
    if true_params.len() != target.params.len() {
        return Err(Error::InvalidConfig(format!(
            "oracle designs need equal path counts (true {}, target {})",
            true_params.len(),
            target.params.len()
        )));
    }
    let h = channel_tensor(true_params, books, cfg);
    let h_target = channel_tensor(&target.params, books, cfg);
    let dims = h.dims();
    let ratio = checked_ratio(h_target.as_slice(), h.as_slice(), |i| {
        let k = i % dims[2];
        let s = (i / dims[2]) % dims[1];
        [i / (dims[1] * dims[2]), s, k]
    })?;
    let mut pilot = PilotTensor::new(Tensor3::from_vec(dims, ratio)?);
    let lambda_scale = pilot.normalize_to_budget();
    Ok(SpoofDesign { pilot, lambda_scale })
}

/// Squared mismatch between the spoofed noise-free signal and a candidate model.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SpoofResidual {
    pub value: f64,
}

/// `|| H(true) (.) X - H(candidate) ||^2`.
pub fn spoof_residual(
    pilot: &Tensor3,
    true_params: &PathParameterSet,
    candidate: &PathParameterSet,
    books: &Codebooks,
    cfg: &SystemConfig,
) -> Result<SpoofResidual> {
    let spoofed = channel_tensor(true_params, books, cfg).hadamard(pilot)?;
    let model = channel_tensor(candidate, books, cfg);
    let d = spoofed.distance(&model)?;
    Ok(SpoofResidual { value: d * d })
}
