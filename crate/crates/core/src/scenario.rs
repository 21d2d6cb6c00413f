//! Ground-truth geometry and its forward map to per-path channel parameters.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;
use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// Legs shorter than this are treated as coincident points.
pub const MIN_LEG_M: f64 = 1e-6;

const TWO_PI: f64 = 2.0 * PI;

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut r = x - TWO_PI * (x / TWO_PI).floor();
    if r >= TWO_PI {
        r -= TWO_PI;
    }
    if r > PI {
        r - TWO_PI
    } else {
        r
    }
}

pub type Point = [f64; 2];

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn bearing(from: Point, to: Point) -> f64 {
    (to[1] - from[1]).atan2(to[0] - from[0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2D {
    pub position: Point,
    orientation: f64,
}

impl Pose2D {
    pub fn new(position: Point, orientation_rad: f64) -> Self {
        Self { position, orientation: wrap_angle(orientation_rad) }
    }

    /// Orientation in `(-pi, pi]`.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn set_orientation(&mut self, orientation_rad: f64) {
        self.orientation = wrap_angle(orientation_rad);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioGeometry {
    pub bs: Pose2D,
    pub ue: Pose2D,
    pub scatter_points: Vec<Point>,
    pub clock_bias_s: f64,
    pub speed_of_light: f64,
}

impl ScenarioGeometry {
    pub fn new(bs: Pose2D, ue: Pose2D, scatter_points: Vec<Point>) -> Self {
        Self { bs, ue, scatter_points, clock_bias_s: 0.0, speed_of_light: SPEED_OF_LIGHT }
    }

    /// The two-path reference layout: BS at the origin, UE at (10, 5), one reflector at (7, -15).
    ///
    /// The UE orientation of 4pi/3 keeps both departure angles inside the visible region of
    /// the transmit ULA.
    pub fn reference() -> Self {
        Self::new(
            Pose2D::new([0.0, 0.0], 0.0),
            Pose2D::new([10.0, 5.0], 4.0 * PI / 3.0),
            alloc::vec![[7.0, -15.0]],
        )
    }

    /// The fictitious layout the reference UE pretends to be in: UE at (30, -20), reflector at (40, -10).
    pub fn reference_spoof() -> Self {
        Self::new(
            Pose2D::new([0.0, 0.0], 0.0),
            Pose2D::new([30.0, -20.0], PI / 2.0),
            alloc::vec![[40.0, -10.0]],
        )
    }

    /// Number of propagation paths (one LOS plus one per scatter point).
    pub fn path_count(&self) -> usize {
        1 + self.scatter_points.len()
    }

    /// Moves the UE and every scatter point by `offset`, leaving the BS in place.
    pub fn translated(&self, offset: Point) -> Self {
        let mut g = self.clone();
        g.ue.position = [g.ue.position[0] + offset[0], g.ue.position[1] + offset[1]];
        for p in &mut g.scatter_points {
            *p = [p[0] + offset[0], p[1] + offset[1]];
        }
        g
    }

    /// LOS distance between UE and BS.
    pub fn los_distance(&self) -> f64 {
        dist(self.ue.position, self.bs.position)
    }

    fn check_leg(what: &'static str, a: Point, b: Point) -> Result<f64> {
        let d = dist(a, b);
        if !(d >= MIN_LEG_M) {
            return Err(Error::DegenerateGeometry { what, length_m: d });
        }
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        let finite = |p: Point| p[0].is_finite() && p[1].is_finite();
        let points_ok = finite(self.bs.position)
            && finite(self.ue.position)
            && self.scatter_points.iter().all(|&p| finite(p));
        if !points_ok || !self.clock_bias_s.is_finite() {
            return Err(Error::InvalidConfig("geometry contains non-finite values".into()));
        }
        if !(self.speed_of_light > 0.0) {
            return Err(Error::InvalidConfig("speed of light must be positive".into()));
        }
        Ok(())
    }
}

/// Geometric and complex-gain parameters of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathParams {
    pub delay_s: f64,
    pub aoa_rad: f64,
    pub aod_rad: f64,
    pub gain: Complex64,
}

/// Per-path parameters, LOS first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathParameterSet {
    pub paths: Vec<PathParams>,
}

impl PathParameterSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn delays(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.delay_s).collect()
    }

    pub fn aoas(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.aoa_rad).collect()
    }

    pub fn aods(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.aod_rad).collect()
    }

    pub fn gains(&self) -> Vec<Complex64> {
        self.paths.iter().map(|p| p.gain).collect()
    }

    /// Replaces the path gains; panics if the lengths differ.
    pub fn with_gains(mut self, gains: &[Complex64]) -> Self {
        assert_eq!(gains.len(), self.paths.len(), "one gain per path");
        for (p, g) in self.paths.iter_mut().zip(gains) {
            p.gain = *g;
        }
        self
    }
}

/// Maps a geometry to per-path delays and local-frame angles. Gains are left at zero.
pub fn forward_params(geom: &ScenarioGeometry) -> Result<PathParameterSet> {
    geom.validate()?;
    let bs = geom.bs.position;
    let ue = geom.ue.position;
    let c = geom.speed_of_light;
    let d0 = ScenarioGeometry::check_leg("BS-UE", bs, ue)?;

    let mut paths = Vec::with_capacity(geom.path_count());
    paths.push(PathParams {
        delay_s: d0 / c + geom.clock_bias_s,
        aoa_rad: wrap_angle(bearing(bs, ue) - geom.bs.orientation()),
        aod_rad: wrap_angle(bearing(ue, bs) - geom.ue.orientation()),
        gain: Complex64::zero(),
    });
    for &sp in &geom.scatter_points {
        let d_ue = ScenarioGeometry::check_leg("UE-SP", ue, sp)?;
        let d_bs = ScenarioGeometry::check_leg("SP-BS", sp, bs)?;
        paths.push(PathParams {
            delay_s: (d_ue + d_bs) / c + geom.clock_bias_s,
            aoa_rad: wrap_angle(bearing(bs, sp) - geom.bs.orientation()),
            aod_rad: wrap_angle(bearing(ue, sp) - geom.ue.orientation()),
            gain: Complex64::zero(),
        });
    }
    Ok(PathParameterSet { paths })
}

/// Free-space and radar-equation path-loss parameters. Transmit power is not part of the
/// gain; it enters once through the symbol energy of the channel model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainModelConfig {
    pub g_bs_lin: f64,
    pub g_ue_lin: f64,
    pub rcs_m2: f64,
    pub carrier_hz: f64,
}

impl Default for GainModelConfig {
    /// 7 dBi at the BS, 3 dBi at the UE, a 50 m^2 reflector and a 27.8 GHz carrier.
    fn default() -> Self {
        Self {
            g_bs_lin: crate::db_to_linear(7.0),
            g_ue_lin: crate::db_to_linear(3.0),
            rcs_m2: 50.0,
            carrier_hz: 27.8e9,
        }
    }
}

impl GainModelConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.g_bs_lin, self.g_ue_lin, self.rcs_m2, self.carrier_hz]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("gain model parameters must be finite and positive".into()))
        }
    }
}

/// Power attenuation `eta_l` of each path (LOS first).
pub fn path_attenuations(geom: &ScenarioGeometry, cfg: &GainModelConfig) -> Result<Vec<f64>> {
    geom.validate()?;
    cfg.validate()?;
    let c = geom.speed_of_light;
    let fc = cfg.carrier_hz;
    let bs = geom.bs.position;
    let ue = geom.ue.position;
    let d0 = ScenarioGeometry::check_leg("BS-UE", bs, ue)?;
    let mut eta = Vec::with_capacity(geom.path_count());
    let free_space = c / (4.0 * PI * fc * d0);
    eta.push(free_space * free_space);
    for &sp in &geom.scatter_points {
        let a = ScenarioGeometry::check_leg("UE-SP", ue, sp)?;
        let b = ScenarioGeometry::check_leg("SP-BS", sp, bs)?;
        let four_pi = 4.0 * PI;
        eta.push(cfg.rcs_m2 * c * c / (four_pi * four_pi * four_pi * fc * fc * a * a * b * b));
    }
    Ok(eta)
}

/// Gain magnitudes `sqrt(eta_l G_BS G_UE)`.
pub fn path_gain_magnitudes(geom: &ScenarioGeometry, cfg: &GainModelConfig) -> Result<Vec<f64>> {
    let g = cfg.g_bs_lin * cfg.g_ue_lin;
    Ok(path_attenuations(geom, cfg)?.into_iter().map(|e| (e * g).sqrt()).collect())
}

/// Complex path gains with phases drawn uniformly on `[0, 2pi)`.
pub fn path_gains<R: Rng + ?Sized>(
    geom: &ScenarioGeometry,
    cfg: &GainModelConfig,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let mags = path_gain_magnitudes(geom, cfg)?;
    let phase = Uniform::new(0.0, TWO_PI);
    Ok(mags.into_iter().map(|m| Complex64::from_polar(m, phase.sample(rng))).collect())
}

/// Adds i.i.d. Gaussian position noise to the UE (std `sigma_ue_m` per axis) and to every
/// scatter point (std `sigma_sp_m`). Orientations and clock bias are kept.
pub fn perturb<R: Rng + ?Sized>(
    geom: &ScenarioGeometry,
    sigma_ue_m: f64,
    sigma_sp_m: f64,
    rng: &mut R,
) -> ScenarioGeometry {
    let mut out = geom.clone();
    let mut jitter = |p: &mut Point, sigma: f64| {
        if sigma > 0.0 {
            let n = Normal::new(0.0, sigma).expect("finite positive sigma");
            p[0] += n.sample(rng);
            p[1] += n.sample(rng);
        }
    };
    jitter(&mut out.ue.position, sigma_ue_m);
    for sp in &mut out.scatter_points {
        jitter(sp, sigma_sp_m);
    }
    out
}
