//! One Monte Carlo trial end to end, the DAIS baseline and RMSE aggregation.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::string::String;
use alloc::vec::Vec;

use crate::channel::{channel_tensor, synthesize_received, Codebooks, PilotTensor, SystemConfig};
use crate::error::{Error, Result};
use crate::estimate::{flex_estimate, EstimationResult, FlexConfig};
use crate::locate::{achievable_rate, estimate_position, select_beam_pair};
use crate::rng::{trial_rng, Stream};
use crate::scenario::{forward_params, path_gains, perturb, wrap_angle, GainModelConfig, PathParameterSet, Point, ScenarioGeometry};
use crate::spoof::{design_blind_full, design_full_pilot_tensor, AlternatingConfig, BlindMode, SpoofTarget};
use crate::tensor::Tensor3;
use crate::SPEED_OF_LIGHT;

/// Pilot strategy of the UE (DAIS is a BS-side post-processing baseline on the all-ones pilot).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    NoSpoof,
    Oracle,
    Blind,
    AngleOnlyBlind,
    Dais,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::NoSpoof, Method::Oracle, Method::Blind, Method::AngleOnlyBlind, Method::Dais];

    pub fn tag(self) -> &'static str {
        match self {
            Method::NoSpoof => "no_spoof",
            Method::Oracle => "oht",
            Method::Blind => "bht",
            Method::AngleOnlyBlind => "aobht",
            Method::Dais => "dais",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|m| m.tag() == tag).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|m| m.tag()).collect();
            Error::InvalidConfig(alloc::format!("unknown method '{tag}', expected one of {}", known.join(", ")))
        })
    }

    /// Whether the UE manipulates its pilot towards the spoofing target.
    pub fn spoofs(self) -> bool {
        matches!(self, Method::Oracle | Method::Blind | Method::AngleOnlyBlind)
    }
}

/// Fixed measurement shifts of the DAIS baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DaisShift {
    pub delay_s: f64,
    pub aod_rad: f64,
}

impl Default for DaisShift {
    fn default() -> Self {
        Self { delay_s: 15.0 / SPEED_OF_LIGHT, aod_rad: 0.17 }
    }
}

/// Shifts every delay by `dtau_s` and every AoD by `dphi_rad`; AoAs are untouched.
pub fn dais_baseline(est: &EstimationResult, dtau_s: f64, dphi_rad: f64) -> EstimationResult {
    let mut out = est.clone();
    for p in &mut out.paths {
        p.delay_s += dtau_s;
        p.aod_rad = wrap_angle(p.aod_rad + dphi_rad);
    }
    out
}

/// Root mean square; `NaN` for an empty slice.
pub fn rmse(errors: &[f64]) -> f64 {
    if errors.is_empty() {
        return f64::NAN;
    }
    (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt()
}

/// Distance between the true and the spoofed UE, the error a perfect spoof produces.
pub fn spoof_offset(truth: &ScenarioGeometry, target: &ScenarioGeometry) -> f64 {
    let (a, b) = (truth.ue.position, target.ue.position);
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Everything a trial needs besides the method and the trial id.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub truth: ScenarioGeometry,
    pub target: ScenarioGeometry,
    pub gain: GainModelConfig,
    pub system: SystemConfig,
    pub flex: FlexConfig,
    pub alternating: AlternatingConfig,
    pub dais: DaisShift,
    /// Estimates farther than this from the BS are dropped; `None` keeps every estimate.
    pub coverage_radius_m: Option<f64>,
    /// Per-axis std of the UE and scatter-point errors in the geometry the UE designs from.
    pub design_sigma_ue_m: f64,
    pub design_sigma_sp_m: f64,
    pub base_seed: u64,
}

impl TrialConfig {
    pub fn new(truth: ScenarioGeometry, target: ScenarioGeometry, system: SystemConfig) -> Self {
        Self {
            truth,
            target,
            gain: GainModelConfig::default(),
            system,
            flex: FlexConfig::default(),
            alternating: AlternatingConfig::default(),
            dais: DaisShift::default(),
            coverage_radius_m: None,
            design_sigma_ue_m: 0.0,
            design_sigma_sp_m: 0.0,
            base_seed: 0,
        }
    }

    /// Reference scenario with spoofing target location #1.
    pub fn reference(system: SystemConfig) -> Self {
        Self::new(ScenarioGeometry::reference(), ScenarioGeometry::reference_spoof(), system)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.gain.validate()?;
        self.flex.validate()?;
        if self.coverage_radius_m.is_some_and(|r| !(r > 0.0)) {
            return Err(Error::InvalidConfig("coverage radius must be positive".into()));
        }
        if !(self.design_sigma_ue_m >= 0.0 && self.design_sigma_sp_m >= 0.0) {
            return Err(Error::InvalidConfig("uncertainty sigmas must be non-negative".into()));
        }
        if self.truth.path_count() != self.target.path_count() {
            return Err(Error::InvalidConfig("truth and target need the same number of paths".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialStatus {
    Valid,
    /// Fewer than two paths were detected.
    NoEstimate,
    /// Two paths were found but the range equation is degenerate.
    Degenerate,
    /// The estimate lies outside the coverage radius.
    OutOfCoverage,
}

impl TrialStatus {
    pub fn tag(self) -> &'static str {
        match self {
            TrialStatus::Valid => "valid",
            TrialStatus::NoEstimate => "no_estimate",
            TrialStatus::Degenerate => "degenerate",
            TrialStatus::OutOfCoverage => "out_of_coverage",
        }
    }
}

/// Estimated minus desired measurement for one path (angles wrapped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDeviation {
    pub aoa_rad: f64,
    pub aod_rad: f64,
    pub delay_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial_id: u64,
    pub method: Method,
    pub status: TrialStatus,
    /// Position estimate when two paths were found, even if later rejected.
    pub position: Option<Point>,
    pub eps_est_m: Option<f64>,
    pub eps_dev_m: Option<f64>,
    /// Earliest estimated paths against the desired ones, in delay order.
    pub deviations: Vec<MeasurementDeviation>,
    pub estimate: EstimationResult,
    /// Link rate on the true channel with the beams selected from `Y`; `None` without noise.
    pub rate_bps: Option<f64>,
}

impl TrialOutcome {
    pub fn is_valid(&self) -> bool {
        self.status == TrialStatus::Valid
    }
}

/// Measurements the method is trying to make the BS observe.
fn desired_params(cfg: &TrialConfig, method: Method, truth: &PathParameterSet, target: &PathParameterSet) -> PathParameterSet {
    match method {
        m if m.spoofs() => target.clone(),
        Method::Dais => {
            let mut p = truth.clone();
            for q in &mut p.paths {
                q.delay_s += cfg.dais.delay_s;
                q.aod_rad = wrap_angle(q.aod_rad + cfg.dais.aod_rad);
            }
            p
        }
        _ => truth.clone(),
    }
}

fn deviations(est: &EstimationResult, desired: &PathParameterSet) -> Vec<MeasurementDeviation> {
    let mut want = desired.paths.clone();
    want.sort_by(|a, b| a.delay_s.total_cmp(&b.delay_s));
    est.paths
        .iter()
        .zip(&want)
        .map(|(e, d)| MeasurementDeviation {
            aoa_rad: wrap_angle(e.aoa_rad - d.aoa_rad),
            aod_rad: wrap_angle(e.aod_rad - d.aod_rad),
            delay_s: e.delay_s - d.delay_s,
        })
        .collect()
}

/// Synthesizes the channel, designs the pilot, observes, estimates and locates.
///
/// Channel gains and noise come from streams keyed by `(base_seed, trial_id)` only, so every
/// method sees the same channel and the same noise realization for a given trial.
/// The signal chain of one trial up to the receiver input.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSignal {
    /// True parameters including the drawn gains.
    pub truth: PathParameterSet,
    /// Target delays and angles (gains are not meaningful).
    pub target: PathParameterSet,
    pub pilot: PilotTensor,
    /// Noise-free true channel `H`.
    pub channel: Tensor3,
    /// Received tensor `Y = H (.) X + Q`.
    pub received: Tensor3,
}

/// Draws the gains of a trial, designs the pilot of `method` and synthesizes the received tensor.
pub fn trial_signal(cfg: &TrialConfig, books: &Codebooks, method: Method, trial_id: u64) -> Result<TrialSignal> {
    let sys = &cfg.system;
    let alpha = path_gains(&cfg.truth, &cfg.gain, &mut trial_rng(cfg.base_seed, trial_id, Stream::Gains))?;
    let truth = forward_params(&cfg.truth)?.with_gains(&alpha);
    let target = forward_params(&cfg.target)?;

    let pilot = match method {
        Method::NoSpoof | Method::Dais => PilotTensor::nominal(sys),
        Method::Oracle => {
            let believed = if cfg.design_sigma_ue_m > 0.0 || cfg.design_sigma_sp_m > 0.0 {
                let mut rng = trial_rng(cfg.base_seed, trial_id, Stream::Perturb);
                let g = perturb(&cfg.truth, cfg.design_sigma_ue_m, cfg.design_sigma_sp_m, &mut rng);
                forward_params(&g)?.with_gains(&alpha)
            } else {
                truth.clone()
            };
            let spoof = SpoofTarget::with_plausible_gains(cfg.target.clone(), &alpha, &cfg.gain)?;
            design_full_pilot_tensor(&believed, &spoof, books, sys)?.pilot
        }
        Method::Blind | Method::AngleOnlyBlind => {
            let mode = if method == Method::Blind { BlindMode::Full } else { BlindMode::AngleOnly };
            design_blind_full(&truth, &target, books, sys, &cfg.alternating, mode)?.pilot
        }
    };

    let channel = channel_tensor(&truth, books, sys);
    let received =
        synthesize_received(&channel, &pilot, sys, &mut trial_rng(cfg.base_seed, trial_id, Stream::Noise))?.entries;
    Ok(TrialSignal { truth, target, pilot, channel, received })
}

pub fn run_trial(cfg: &TrialConfig, books: &Codebooks, method: Method, trial_id: u64) -> Result<TrialOutcome> {
    let sys = &cfg.system;
    let TrialSignal { truth, target: target_geom, received: y, .. } = trial_signal(cfg, books, method, trial_id)?;
    let mut estimate = flex_estimate(&y, books, sys, &cfg.flex)?;
    if method == Method::Dais {
        estimate = dais_baseline(&estimate, cfg.dais.delay_s, cfg.dais.aod_rad);
    }

    let desired = desired_params(cfg, method, &truth, &target_geom);
    let deviations = deviations(&estimate, &desired);
    let rate_bps = if sys.noise_psd_w_per_hz > 0.0 {
        Some(achievable_rate(&truth, select_beam_pair(&y), books, sys)?.rate_bps)
    } else {
        None
    };

    let (status, position) = match estimate_position(&estimate, &cfg.truth.bs) {
        None => (TrialStatus::NoEstimate, None),
        Some(p) if !p.valid => (TrialStatus::Degenerate, Some(p.position)),
        Some(p) if cfg.coverage_radius_m.is_some_and(|r| p.d0_m > r) => (TrialStatus::OutOfCoverage, Some(p.position)),
        Some(p) => (TrialStatus::Valid, Some(p.position)),
    };
    let dist = |a: Point, b: Point| (a[0] - b[0]).hypot(a[1] - b[1]);
    let (eps_est_m, eps_dev_m) = match (status, position) {
        (TrialStatus::Valid, Some(p)) => (Some(dist(p, cfg.truth.ue.position)), Some(dist(p, cfg.target.ue.position))),
        _ => (None, None),
    };

    Ok(TrialOutcome { trial_id, method, status, position, eps_est_m, eps_dev_m, deviations, estimate, rate_bps })
}

/// Aggregate of one method at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub method: Method,
    pub axis_value: f64,
    pub trials: usize,
    pub valid: usize,
    pub no_estimate: usize,
    pub degenerate: usize,
    pub out_of_coverage: usize,
    /// Trials whose pilot design or estimation returned an error.
    pub failed: usize,
    pub rmse_est_m: f64,
    pub rmse_dev_m: f64,
    /// Per-path RMSE of the measurement deviations over trials that detected the path.
    pub rmse_aoa_rad: Vec<f64>,
    pub rmse_aod_rad: Vec<f64>,
    pub rmse_delay_s: Vec<f64>,
    pub mean_rate_bps: f64,
    /// First error message, if any trial failed.
    pub first_error: Option<String>,
}

/// Reduces trial outcomes in the given order; errors are counted, never imputed.
pub fn summarize(method: Method, axis_value: f64, outcomes: &[Result<TrialOutcome>], path_count: usize) -> SweepSummary {
    let ok: Vec<&TrialOutcome> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let count = |s: TrialStatus| ok.iter().filter(|o| o.status == s).count();
    let est: Vec<f64> = ok.iter().filter_map(|o| o.eps_est_m).collect();
    let dev: Vec<f64> = ok.iter().filter_map(|o| o.eps_dev_m).collect();
    let per_path = |f: fn(&MeasurementDeviation) -> f64| -> Vec<f64> {
        (0..path_count)
            .map(|i| {
                let v: Vec<f64> = ok.iter().filter_map(|o| o.deviations.get(i).map(f)).collect();
                rmse(&v)
            })
            .collect()
    };
    let rates: Vec<f64> = ok.iter().filter_map(|o| o.rate_bps).collect();
    let mean_rate_bps = if rates.is_empty() { f64::NAN } else { rates.iter().sum::<f64>() / rates.len() as f64 };
    SweepSummary {
        method,
        axis_value,
        trials: outcomes.len(),
        valid: count(TrialStatus::Valid),
        no_estimate: count(TrialStatus::NoEstimate),
        degenerate: count(TrialStatus::Degenerate),
        out_of_coverage: count(TrialStatus::OutOfCoverage),
        failed: outcomes.len() - ok.len(),
        rmse_est_m: rmse(&est),
        rmse_dev_m: rmse(&dev),
        rmse_aoa_rad: per_path(|d| d.aoa_rad),
        rmse_aod_rad: per_path(|d| d.aod_rad),
        rmse_delay_s: per_path(|d| d.delay_s),
        mean_rate_bps,
        first_error: outcomes.iter().find_map(|o| o.as_ref().err().map(|e| alloc::format!("{e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::build_codebooks;
    use crate::estimate::EstimatedPath;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quiet(k: usize) -> TrialConfig {
        let mut sys = SystemConfig::with_subcarriers(k);
        sys.noise_psd_w_per_hz = 0.0;
        TrialConfig::reference(sys)
    }

    #[test]
    fn tags_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::from_tag(m.tag()).unwrap(), m);
        }
        let err = Method::from_tag("nope").unwrap_err();
        assert!(alloc::format!("{err}").contains("no_spoof, oht, bht, aobht, dais"));
    }

    #[test]
    fn rmse_closed_form() {
        assert_eq!(rmse(&[3.0, 4.0, 0.0]), (25.0f64 / 3.0).sqrt());
        assert_eq!(rmse(&[2.5; 7]), 2.5);
        assert!(rmse(&[]).is_nan());
    }

    #[test]
    fn offset_matches_geometry() {
        let o = spoof_offset(&ScenarioGeometry::reference(), &ScenarioGeometry::reference_spoof());
        assert!((o - 32.0156).abs() < 1e-4);
    }

    #[test]
    fn dais_shift_does_not_move_the_estimate() {
        let g = ScenarioGeometry::reference();
        let p = forward_params(&g).unwrap();
        let est = EstimationResult {
            paths: p
                .paths
                .iter()
                .map(|q| EstimatedPath { delay_s: q.delay_s, aoa_rad: q.aoa_rad, aod_rad: q.aod_rad, gain: Complex64::new(1.0, 0.0), peak_power: 1.0, reliable: true })
                .collect(),
        };
        let base = estimate_position(&est, &g.bs).unwrap().position;
        assert_eq!(dais_baseline(&est, 0.0, 0.0), est);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let shifted = dais_baseline(&est, rng.gen_range(-1e-7..1e-7), rng.gen_range(-0.3..0.3));
            let q = estimate_position(&shifted, &g.bs).unwrap().position;
            assert!((q[0] - base[0]).hypot(q[1] - base[1]) < 1e-9);
            assert_eq!(shifted.paths[0].aoa_rad, est.paths[0].aoa_rad);
        }
    }

    #[test]
    fn noise_free_no_spoof_and_oracle() {
        let cfg = quiet(128);
        let books = build_codebooks(&cfg.system);
        let a = run_trial(&cfg, &books, Method::NoSpoof, 0).unwrap();
        assert!(a.is_valid() && a.eps_est_m.unwrap() < 1e-3, "{a:?}");
        let b = run_trial(&cfg, &books, Method::Oracle, 0).unwrap();
        assert!(b.is_valid() && b.eps_dev_m.unwrap() < 1e-3, "{b:?}");
        for d in &b.deviations {
            assert!(d.aoa_rad.abs() < 1e-6 && d.aod_rad.abs() < 1e-6);
        }
    }

    #[test]
    fn trials_are_deterministic_and_paired() {
        let cfg = TrialConfig::reference(SystemConfig::with_subcarriers(64));
        let books = build_codebooks(&cfg.system);
        let a = run_trial(&cfg, &books, Method::Oracle, 3).unwrap();
        let b = run_trial(&cfg, &books, Method::Oracle, 3).unwrap();
        assert_eq!(a, b);
        // DAIS is post-processing of the no-spoof observation, so the estimate is the shift of it.
        let n = run_trial(&cfg, &books, Method::NoSpoof, 3).unwrap();
        let d = run_trial(&cfg, &books, Method::Dais, 3).unwrap();
        assert_eq!(dais_baseline(&n.estimate, cfg.dais.delay_s, cfg.dais.aod_rad), d.estimate);
        assert_eq!(n.rate_bps, d.rate_bps);
    }

    #[test]
    fn summary_counts_everything() {
        let cfg = quiet(128);
        let books = build_codebooks(&cfg.system);
        let mut outs: Vec<Result<TrialOutcome>> = (0..3).map(|t| run_trial(&cfg, &books, Method::NoSpoof, t)).collect();
        outs.push(Err(Error::RankDeficient("test")));
        let s = summarize(Method::NoSpoof, 35.0, &outs, 2);
        assert_eq!((s.trials, s.valid, s.failed), (4, 3, 1));
        assert!(s.rmse_est_m < 1e-3);
        assert_eq!(s.rmse_aoa_rad.len(), 2);
        assert!(s.first_error.is_some());
        let empty = summarize(Method::Oracle, 0.0, &[], 2);
        assert!(empty.rmse_est_m.is_nan() && empty.valid == 0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = quiet(16);
        cfg.coverage_radius_m = Some(0.0);
        assert!(cfg.validate().is_err());
        let mut cfg = quiet(16);
        cfg.target.scatter_points.push([1.0, 1.0]);
        assert!(cfg.validate().is_err());
        assert!(quiet(16).validate().is_ok());
    }
}
