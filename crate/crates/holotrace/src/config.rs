//! TOML scenario and experiment files.
//!
//! Angles are in radians, distances in meters, powers in dBm and gains in dBi. Decibel
//! fields are converted to linear scale once, when the file is resolved.

use std::fs;
use std::path::Path;

use holotrace_core::channel::{thermal_noise_psd, SystemConfig};
use holotrace_core::scenario::{GainModelConfig, Point, Pose2D, ScenarioGeometry};
use holotrace_core::spoof::FakePathPlan;
use holotrace_core::trial::{Method, TrialConfig};
use holotrace_core::{db_to_linear, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseSpec {
    pub position: Point,
    #[serde(default)]
    pub orientation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UeSpec {
    pub position: Point,
    #[serde(default)]
    pub orientation: f64,
    #[serde(default)]
    pub clock_bias_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GainSpec {
    pub tx_power_dbm: f64,
    pub g_bs_dbi: f64,
    pub g_ue_dbi: f64,
    pub rcs_m2: f64,
}

impl Default for GainSpec {
    fn default() -> Self {
        Self { tx_power_dbm: 35.0, g_bs_dbi: 7.0, g_ue_dbi: 3.0, rcs_m2: 50.0 }
    }
}

/// Array, codebook and OFDM numerology. Omitted fields keep the reference values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSpec {
    pub n_rx: usize,
    pub n_tx: usize,
    pub n_combiners: usize,
    pub n_precoders: usize,
    pub subcarriers: usize,
    pub subcarrier_spacing_hz: f64,
    pub noise_figure_db: f64,
    /// Overrides the thermal density derived from `noise_figure_db`; 0 gives noise-free runs.
    pub noise_psd_w_per_hz: Option<f64>,
}

impl Default for SystemSpec {
    fn default() -> Self {
        let s = SystemConfig::desk();
        Self {
            n_rx: s.n_rx,
            n_tx: s.n_tx,
            n_combiners: s.n_combiners,
            n_precoders: s.n_precoders,
            subcarriers: s.n_subcarriers,
            subcarrier_spacing_hz: s.subcarrier_spacing_hz,
            noise_figure_db: 0.0,
            noise_psd_w_per_hz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FakePathSpec {
    pub offset_s: f64,
    #[serde(default = "one")]
    pub amp_re: f64,
    #[serde(default)]
    pub amp_im: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpoofSpec {
    pub ue: UeSpec,
    #[serde(default)]
    pub scatter_points: Vec<Point>,
    /// Explicit delay-injection plan for the `fake_paths` pilot of the `design` command.
    #[serde(default)]
    pub fake_paths: Vec<FakePathSpec>,
}

fn default_carrier() -> f64 {
    27.8e9
}

/// Contents of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default = "default_carrier")]
    pub carrier_hz: f64,
    pub bs: PoseSpec,
    pub ue: UeSpec,
    #[serde(default)]
    pub scatter_points: Vec<Point>,
    #[serde(default)]
    pub gain: GainSpec,
    #[serde(default)]
    pub system: SystemSpec,
    pub spoof: SpoofSpec,
}

impl ScenarioSpec {
    /// The built-in two-path reference scenario with spoofing target location #1.
    pub fn reference() -> Self {
        let truth = ScenarioGeometry::reference();
        let target = ScenarioGeometry::reference_spoof();
        Self {
            carrier_hz: default_carrier(),
            bs: PoseSpec { position: truth.bs.position, orientation: truth.bs.orientation() },
            ue: UeSpec { position: truth.ue.position, orientation: truth.ue.orientation(), clock_bias_s: 0.0 },
            scatter_points: truth.scatter_points,
            gain: GainSpec::default(),
            system: SystemSpec::default(),
            spoof: SpoofSpec {
                ue: UeSpec { position: target.ue.position, orientation: target.ue.orientation(), clock_bias_s: 0.0 },
                scatter_points: target.scatter_points,
                fake_paths: Vec::new(),
            },
        }
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        parse_file(path)
    }

    fn geometry(&self, ue: &UeSpec, scatter_points: &[Point]) -> ScenarioGeometry {
        let mut g = ScenarioGeometry::new(
            Pose2D::new(self.bs.position, self.bs.orientation),
            Pose2D::new(ue.position, ue.orientation),
            scatter_points.to_vec(),
        );
        g.clock_bias_s = ue.clock_bias_s;
        g
    }

    pub fn truth(&self) -> ScenarioGeometry {
        self.geometry(&self.ue, &self.scatter_points)
    }

    pub fn target(&self) -> ScenarioGeometry {
        self.geometry(&self.spoof.ue, &self.spoof.scatter_points)
    }

    pub fn gain_model(&self) -> GainModelConfig {
        GainModelConfig {
            g_bs_lin: db_to_linear(self.gain.g_bs_dbi),
            g_ue_lin: db_to_linear(self.gain.g_ue_dbi),
            rcs_m2: self.gain.rcs_m2,
            carrier_hz: self.carrier_hz,
        }
    }

    /// System parameters; `full` switches to the full 3300-tone bandwidth.
    pub fn system(&self, full: bool) -> SystemConfig {
        let s = &self.system;
        let mut cfg = SystemConfig::with_subcarriers(if full { SystemConfig::full().n_subcarriers } else { s.subcarriers });
        cfg.n_rx = s.n_rx;
        cfg.n_tx = s.n_tx;
        cfg.n_combiners = s.n_combiners;
        cfg.n_precoders = s.n_precoders;
        cfg.subcarrier_spacing_hz = s.subcarrier_spacing_hz;
        cfg.carrier_hz = self.carrier_hz;
        cfg.noise_psd_w_per_hz = s.noise_psd_w_per_hz.unwrap_or_else(|| thermal_noise_psd(s.noise_figure_db));
        cfg.with_tx_power_dbm(self.gain.tx_power_dbm)
    }

    pub fn fake_path_plan(&self) -> AppResult<Option<FakePathPlan>> {
        if self.spoof.fake_paths.is_empty() {
            return Ok(None);
        }
        let plan = FakePathPlan {
            delay_offsets_s: self.spoof.fake_paths.iter().map(|f| f.offset_s).collect(),
            amplitudes: self.spoof.fake_paths.iter().map(|f| Complex64::new(f.amp_re, f.amp_im)).collect(),
        };
        plan.validate()?;
        Ok(Some(plan))
    }

    /// Trial configuration with every core default; the caller adjusts sweep-specific fields.
    pub fn trial_config(&self, full: bool, seed: u64) -> AppResult<TrialConfig> {
        if self.bs.position.iter().chain(&self.ue.position).any(|v| !v.is_finite()) {
            return Err(AppError::Config("positions must be finite".into()));
        }
        let mut cfg = TrialConfig::new(self.truth(), self.target(), self.system(full));
        cfg.gain = self.gain_model();
        cfg.base_seed = seed;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// RMSE, per-path measurement deviation and rate versus transmit power.
    Power,
    /// RMSE versus the std of the UE position error in the geometry used for the design.
    Uncertainty,
}

/// Spoofing target of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetChoice {
    /// The target of the scenario file (location #1).
    Primary,
    /// Location #2: on the BS-UE ray, as far behind the true UE as the primary target is away
    /// from it, with the reflector moved along.
    Behind,
}

impl TargetChoice {
    pub fn tag(self) -> &'static str {
        match self {
            TargetChoice::Primary => "primary",
            TargetChoice::Behind => "behind",
        }
    }
}

fn default_methods() -> Vec<String> {
    vec!["no_spoof".into(), "oht".into()]
}

fn default_targets() -> Vec<TargetChoice> {
    vec![TargetChoice::Primary]
}

fn default_trials() -> usize {
    50
}

/// Contents of an experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    #[serde(default = "default_targets")]
    pub targets: Vec<TargetChoice>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Axis of a power sweep.
    #[serde(default)]
    pub powers_dbm: Vec<f64>,
    /// Axis of an uncertainty sweep.
    #[serde(default)]
    pub sigmas_ue_m: Vec<f64>,
    #[serde(default)]
    pub sigma_sp_m: f64,
    /// Transmit power of an uncertainty sweep; the scenario value when omitted.
    pub power_dbm: Option<f64>,
    /// Estimates farther from the BS are dropped and counted.
    pub coverage_radius_m: Option<f64>,
}

impl ExperimentSpec {
    pub fn load(path: &Path) -> AppResult<Self> {
        let spec: Self = parse_file(path)?;
        spec.validate().map_err(|e| match e {
            AppError::Config(message) => AppError::Parse { path: path.to_path_buf(), message },
            other => other,
        })?;
        Ok(spec)
    }

    pub fn methods(&self) -> AppResult<Vec<Method>> {
        self.methods.iter().map(|m| Method::from_tag(m).map_err(AppError::from)).collect()
    }

    /// Sweep axis values: powers in dBm or sigmas in meters.
    pub fn axis(&self) -> &[f64] {
        match self.kind {
            ExperimentKind::Power => &self.powers_dbm,
            ExperimentKind::Uncertainty => &self.sigmas_ue_m,
        }
    }

    pub fn axis_name(&self) -> &'static str {
        match self.kind {
            ExperimentKind::Power => "tx_power_dbm",
            ExperimentKind::Uncertainty => "sigma_ue_m",
        }
    }

    pub fn validate(&self) -> AppResult<()> {
        self.methods()?;
        if self.methods.is_empty() || self.targets.is_empty() {
            return Err(AppError::Config("at least one method and one target are required".into()));
        }
        if self.trials == 0 {
            return Err(AppError::Config("trials must be at least 1".into()));
        }
        if self.axis().is_empty() {
            let field = if self.kind == ExperimentKind::Power { "powers_dbm" } else { "sigmas_ue_m" };
            return Err(AppError::Config(format!("{field} must list at least one value")));
        }
        if self.axis().iter().any(|v| !v.is_finite()) {
            return Err(AppError::Config("sweep values must be finite".into()));
        }
        let negative_sigma = self.kind == ExperimentKind::Uncertainty && self.sigmas_ue_m.iter().any(|s| *s < 0.0);
        if negative_sigma || self.sigma_sp_m < 0.0 {
            return Err(AppError::Config("uncertainty sigmas must be non-negative".into()));
        }
        if self.coverage_radius_m.is_some_and(|r| r.is_nan() || r <= 0.0) {
            return Err(AppError::Config("coverage_radius_m must be positive".into()));
        }
        Ok(())
    }
}

fn parse_file<T: serde::de::DeserializeOwned>(path: &Path) -> AppResult<T> {
    let text = fs::read_to_string(path).map_err(|source| AppError::Read { path: path.to_path_buf(), source })?;
    toml::from_str(&text).map_err(|e| AppError::Parse { path: path.to_path_buf(), message: e.to_string() })
}
