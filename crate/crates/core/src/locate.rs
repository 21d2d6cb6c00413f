//! Single-anchor positioning from two paths, beam selection and achievable rate.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::{channel_tensor, factor_matrices, ula_steering, Codebooks, SystemConfig};
use crate::error::{Error, Result};
use crate::estimate::EstimationResult;
use crate::linalg::CMatrix;
use crate::scenario::{wrap_angle, GainModelConfig, PathParameterSet, Point, Pose2D, ScenarioGeometry};
use crate::spoof::{design_full_pilot_tensor, SpoofTarget};
use crate::tensor::Tensor3;
use crate::SPEED_OF_LIGHT;

/// Denominators of the law-of-sines range below this are treated as degenerate.
pub const RANGE_DENOMINATOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionEstimate {
    pub position: Point,
    /// Estimated BS-UE range.
    pub d0_m: f64,
    /// Indices of the LOS and NLOS paths in the estimation result.
    pub used_paths: (usize, usize),
    /// False when the geometry is degenerate or the range is not positive and finite.
    pub valid: bool,
}

/// Delay and local-frame angles of one path, the inputs of the range equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathMeasurement {
    pub delay_s: f64,
    pub aoa_rad: f64,
    pub aod_rad: f64,
}

/// Range from the triangle BS, UE, reflector: the interior angles at BS and UE are the
/// AoA and AoD differences and the excess path length is `c * TDoA`, so the law of sines
/// gives `d0 = c dtau sin(dth + dph) / (sin dth + sin dph - sin(dth + dph))`.
///
/// Returns `(d0, denominator)`.
pub fn los_range(los: &PathMeasurement, nlos: &PathMeasurement, speed_of_light: f64) -> (f64, f64) {
    let dtheta = wrap_angle(nlos.aoa_rad - los.aoa_rad).abs();
    let dphi = wrap_angle(nlos.aod_rad - los.aod_rad).abs();
    let sum = (dtheta + dphi).sin();
    let den = dtheta.sin() + dphi.sin() - sum;
    let excess = speed_of_light * (nlos.delay_s - los.delay_s);
    (excess * sum / den, den)
}

/// Places the UE at range `d0` along the (global-frame) LOS arrival direction.
pub fn locate_from_paths(los: &PathMeasurement, nlos: &PathMeasurement, bs: &Pose2D, speed_of_light: f64) -> (Point, f64, bool) {
    let (d0, den) = los_range(los, nlos, speed_of_light);
    let heading = los.aoa_rad + bs.orientation();
    let p = [bs.position[0] + d0 * heading.cos(), bs.position[1] + d0 * heading.sin()];
    let valid = den.abs() >= RANGE_DENOMINATOR_TOL && d0 > 0.0 && d0.is_finite();
    (p, d0, valid)
}

/// Position from the two earliest estimated paths (LOS first, NLOS second). `None` when
/// fewer than two paths were detected.
pub fn estimate_position(est: &EstimationResult, bs: &Pose2D) -> Option<PositionEstimate> {
    if est.paths.len() < 2 {
        return None;
    }
    // Paths are delay-sorted by the estimator; sort defensively for hand-built inputs.
    let mut order: Vec<usize> = (0..est.paths.len()).collect();
    order.sort_by(|&a, &b| est.paths[a].delay_s.total_cmp(&est.paths[b].delay_s));
    let m = |i: usize| {
        let p = &est.paths[i];
        PathMeasurement { delay_s: p.delay_s, aoa_rad: p.aoa_rad, aod_rad: p.aod_rad }
    };
    let (position, d0_m, valid) = locate_from_paths(&m(order[0]), &m(order[1]), bs, SPEED_OF_LIGHT);
    Some(PositionEstimate { position, d0_m, used_paths: (order[0], order[1]), valid })
}

/// Position from exact parameters (no estimation), LOS and NLOS taken as the two earliest paths.
pub fn position_from_params(params: &PathParameterSet, geom: &ScenarioGeometry) -> Option<PositionEstimate> {
    let est = EstimationResult {
        paths: params
            .paths
            .iter()
            .map(|p| crate::estimate::EstimatedPath {
                delay_s: p.delay_s,
                aoa_rad: p.aoa_rad,
                aod_rad: p.aod_rad,
                gain: p.gain,
                peak_power: 0.0,
                reliable: true,
            })
            .collect(),
    };
    estimate_position(&est, &geom.bs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BeamSelection {
    pub combiner: usize,
    pub precoder: usize,
}

/// Beam pair with the largest received energy `sum_k |y[m,s,k]|^2`; ties go to the smallest
/// combiner index, then the smallest precoder index.
pub fn select_beam_pair(y: &Tensor3) -> BeamSelection {
    let [m, s, _] = y.dims();
    let mut best = BeamSelection { combiner: 0, precoder: 0 };
    let mut best_e = f64::NEG_INFINITY;
    for mi in 0..m {
        for si in 0..s {
            let e: f64 = y.fiber(mi, si).iter().map(|v| v.norm_sqr()).sum();
            if e > best_e {
                best_e = e;
                best = BeamSelection { combiner: mi, precoder: si };
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub rate_bps: f64,
    /// `gamma_k E_s / N_0` per subcarrier.
    pub per_subcarrier_snr: Vec<f64>,
}

impl RateReport {
    fn from_snr(per_subcarrier_snr: Vec<f64>, spacing_hz: f64) -> Self {
        let rate_bps = per_subcarrier_snr.iter().map(|s| spacing_hz * (1.0 + s).log2()).sum();
        Self { rate_bps, per_subcarrier_snr }
    }
}

fn noise_psd(cfg: &SystemConfig) -> Result<f64> {
    if cfg.noise_psd_w_per_hz > 0.0 {
        Ok(cfg.noise_psd_w_per_hz)
    } else {
        Err(Error::InvalidConfig("rate needs a positive noise density".into()))
    }
}

/// Sum rate over subcarriers of the physical channel seen through the selected beams.
pub fn achievable_rate(
    params: &PathParameterSet,
    sel: BeamSelection,
    books: &Codebooks,
    cfg: &SystemConfig,
) -> Result<RateReport> {
    let n0 = noise_psd(cfg)?;
    let f = factor_matrices(params, books, cfg);
    let coef: Vec<Complex64> = params
        .paths
        .iter()
        .enumerate()
        .map(|(l, p)| p.gain * f.b[(sel.combiner, l)] * f.c[(sel.precoder, l)])
        .collect();
    let es = cfg.symbol_energy();
    let snr = (0..cfg.n_subcarriers)
        .map(|k| {
            let h: Complex64 = coef.iter().enumerate().map(|(l, c)| c * f.d[(k, l)]).sum();
            h.norm_sqr() * es / n0
        })
        .collect();
    Ok(RateReport::from_snr(snr, cfg.subcarrier_spacing_hz))
}

/// Rate with per-subcarrier dominant-eigenmode beamforming (the largest singular value of
/// `H_k`), an upper bound on any unit-norm codebook pair.
pub fn perfect_csi_rate(params: &PathParameterSet, cfg: &SystemConfig) -> Result<RateReport> {
    let n0 = noise_psd(cfg)?;
    let ar: Vec<_> = params.paths.iter().map(|p| ula_steering(cfg.n_rx, p.aoa_rad)).collect();
    let at: Vec<_> = params.paths.iter().map(|p| ula_steering(cfg.n_tx, p.aod_rad)).collect();
    let es = cfg.symbol_energy();
    let snr = (0..cfg.n_subcarriers)
        .map(|k| {
            let w: Vec<Complex64> = params
                .paths
                .iter()
                .map(|p| p.gain * Complex64::from_polar(1.0, -2.0 * PI * k as f64 * cfg.subcarrier_spacing_hz * p.delay_s))
                .collect();
            let hk = CMatrix::from_fn(cfg.n_rx, cfg.n_tx, |i, j| (0..w.len()).map(|l| w[l] * ar[l][i] * at[l][j]).sum());
            let smax = hk.singular_values().iter().copied().fold(0.0, f64::max);
            smax * smax * es / n0
        })
        .collect();
    Ok(RateReport::from_snr(snr, cfg.subcarrier_spacing_hz))
}

/// Everything needed to evaluate the link rate when spoofing towards a given position.
#[derive(Debug, Clone)]
pub struct HeatmapContext<'a> {
    pub truth_geometry: &'a ScenarioGeometry,
    /// True parameters including gains.
    pub truth: &'a PathParameterSet,
    pub gain_cfg: &'a GainModelConfig,
    pub books: &'a Codebooks,
    pub cfg: &'a SystemConfig,
}

/// Target layout for a candidate spoofed UE position: the UE and every scatter point are
/// moved by the same offset, which keeps the reflector at the same relative position.
pub fn co_translated_target(truth: &ScenarioGeometry, candidate: Point) -> ScenarioGeometry {
    let ue = truth.ue.position;
    truth.translated([candidate[0] - ue[0], candidate[1] - ue[1]])
}

/// Co-translated target on the BS-UE ray, `distance_m` farther from the BS than the true UE.
pub fn target_behind(truth: &ScenarioGeometry, distance_m: f64) -> Result<ScenarioGeometry> {
    let (bs, ue) = (truth.bs.position, truth.ue.position);
    let (dx, dy) = (ue[0] - bs[0], ue[1] - bs[1]);
    let r = dx.hypot(dy);
    if r < 1e-6 {
        return Err(Error::DegenerateGeometry { what: "BS-UE", length_m: r });
    }
    let s = distance_m / r;
    Ok(co_translated_target(truth, [ue[0] + s * dx, ue[1] + s * dy]))
}

/// Rate on the true channel when the UE spoofs `target` with the oracle design and the BS
/// selects beams on the (noise-free) spoofed observation.
pub fn spoofed_rate(ctx: &HeatmapContext<'_>, target: &ScenarioGeometry) -> Result<RateReport> {
    let target = SpoofTarget::with_plausible_gains(target.clone(), &ctx.truth.gains(), ctx.gain_cfg)?;
    let design = design_full_pilot_tensor(ctx.truth, &target, ctx.books, ctx.cfg)?;
    let y = channel_tensor(ctx.truth, ctx.books, ctx.cfg).hadamard(&design.pilot.entries)?;
    achievable_rate(ctx.truth, select_beam_pair(&y), ctx.books, ctx.cfg)
}

/// Rate for each candidate position of a co-translated spoofing target.
pub fn rate_heatmap(ctx: &HeatmapContext<'_>, points: &[Point]) -> Result<Vec<(Point, f64)>> {
    points
        .iter()
        .map(|&p| Ok((p, spoofed_rate(ctx, &co_translated_target(ctx.truth_geometry, p))?.rate_bps)))
        .collect()
}

/// Cartesian grid clipped to an angular sector and a maximum radius around the BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorGrid {
    /// Sector bounds relative to the BS orientation, radians.
    pub min_angle_rad: f64,
    pub max_angle_rad: f64,
    pub radius_m: f64,
    pub step_m: f64,
}

impl SectorGrid {
    /// Cell centres on the lattice `step * (i, j)` (relative to the BS) that lie inside the
    /// sector and radius, ordered by x then y. The BS cell itself is excluded.
    pub fn points(&self, bs: &Pose2D) -> Vec<Point> {
        if !(self.step_m > 0.0 && self.radius_m > 0.0) {
            return Vec::new();
        }
        let n = (self.radius_m / self.step_m).floor() as i64;
        let mut out = Vec::new();
        for i in -n..=n {
            for j in -n..=n {
                let (dx, dy) = (i as f64 * self.step_m, j as f64 * self.step_m);
                let r = dx.hypot(dy);
                if r == 0.0 || r > self.radius_m + 1e-9 {
                    continue;
                }
                let a = wrap_angle(dy.atan2(dx) - bs.orientation());
                if a < self.min_angle_rad - 1e-12 || a > self.max_angle_rad + 1e-12 {
                    continue;
                }
                out.push([bs.position[0] + dx, bs.position[1] + dy]);
            }
        }
        out
    }
}
