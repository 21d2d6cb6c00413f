//! Implementations of the CLI subcommands. Each returns the paths it wrote, manifest last.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use holotrace_core::channel::{build_codebooks, Codebooks, PilotTensor, SystemConfig};
use holotrace_core::estimate::{tensor_angle_spectrum, tensor_delay_spectrum, AngleDomain, Spectrum};
use holotrace_core::locate::{co_translated_target, estimate_position, spoofed_rate, HeatmapContext, SectorGrid};
use holotrace_core::rng::{trial_rng, Stream};
use holotrace_core::scenario::{forward_params, path_gains, Point};
use holotrace_core::spoof::{
    blind_kronecker_pilot, design_blind_full, design_full_pilot_tensor, fake_path_pilot, spoof_residual, BlindMode,
    SpoofTarget,
};
use holotrace_core::trial::{trial_signal, Method, TrialConfig};
use holotrace_core::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{ExperimentSpec, ScenarioSpec, TargetChoice};
use crate::dump::write_tensor;
use crate::error::{AppError, AppResult};
use crate::output::{
    write_csv, AngleSpectrumRow, DelaySpectrumRow, DesignRow, EstimationRow, HeatmapRow, MarkerRow, PeakRow,
    PositionRow, RunManifest,
};
use crate::sweep::{run_sweep, run_trials, target_geometry};

/// Trials per sweep point with `--full`.
pub const FULL_TRIALS: usize = 250;

/// Grid step of the angle spectra, radians.
pub const SPECTRUM_ANGLE_STEP: f64 = 1e-3;

/// Oversampling of the delay spectrum relative to the `1 / (K df)` resolution.
pub const SPECTRUM_DELAY_OVERSAMPLE: usize = 8;

/// Inputs shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Context {
    pub scenario: ScenarioSpec,
    pub seed: u64,
    pub full: bool,
    pub out: PathBuf,
}

impl Context {
    pub fn load(scenario: Option<&Path>, seed: u64, full: bool, out: PathBuf) -> AppResult<Self> {
        let scenario = match scenario {
            Some(p) => ScenarioSpec::load(p)?,
            None => ScenarioSpec::reference(),
        };
        Ok(Self { scenario, seed, full, out })
    }

    pub fn trial_config(&self) -> AppResult<TrialConfig> {
        self.scenario.trial_config(self.full, self.seed)
    }

    fn manifest(&self, command: &str, cfg: &TrialConfig, extra: serde_json::Value, files: &[PathBuf]) -> RunManifest {
        let s = &cfg.system;
        RunManifest {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            seed: self.seed,
            full: self.full,
            output_dir: self.out.clone(),
            config: json!({
                "scenario": self.scenario,
                "resolved_system": {
                    "subcarriers": s.n_subcarriers,
                    "tx_power_w": s.tx_power_w,
                    "noise_psd_w_per_hz": s.noise_psd_w_per_hz,
                    "symbol_energy": s.symbol_energy(),
                },
                "command": extra,
            }),
            files: files.iter().filter_map(|p| p.file_name()).map(|n| n.to_string_lossy().into_owned()).collect(),
        }
    }

    fn finish(&self, command: &str, cfg: &TrialConfig, extra: serde_json::Value, mut files: Vec<PathBuf>) -> AppResult<Vec<PathBuf>> {
        let manifest = self.manifest(command, cfg, extra, &files).write()?;
        files.push(manifest);
        Ok(files)
    }
}

fn peak_row(signal: &str, dim: &str, s: &Spectrum) -> PeakRow {
    let i = s.argmax_index();
    PeakRow { signal: signal.into(), dim: dim.into(), index: i, x: s.grid[i], power: s.power[i] }
}

/// AoA, AoD and delay spectra of trial 0 for the unmodified pilot and for `method`.
pub fn spectra(ctx: &Context, method: Method) -> AppResult<Vec<PathBuf>> {
    let cfg = ctx.trial_config()?;
    let books = build_codebooks(&cfg.system);
    let mut methods = vec![Method::NoSpoof];
    if method != Method::NoSpoof {
        methods.push(method);
    }
    let (mut aoa, mut aod, mut delay, mut peaks) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for m in methods {
        let y = trial_signal(&cfg, &books, m, 0)?.received;
        let tag = m.tag();
        for (domain, dim, rows) in [(AngleDomain::Arrival, "aoa", &mut aoa), (AngleDomain::Departure, "aod", &mut aod)] {
            let s = tensor_angle_spectrum(&y, &books, domain, SPECTRUM_ANGLE_STEP);
            peaks.push(peak_row(tag, dim, &s));
            rows.extend(s.grid.iter().zip(&s.power).map(|(&a, &p)| AngleSpectrumRow { signal: tag.into(), angle_rad: a, power: p }));
        }
        let s = tensor_delay_spectrum(&y, &cfg.system, SPECTRUM_DELAY_OVERSAMPLE);
        peaks.push(peak_row(tag, "delay", &s));
        delay.extend(s.grid.iter().zip(&s.power).map(|(&t, &p)| DelaySpectrumRow { signal: tag.into(), delay_s: t, power: p }));
    }
    let files = vec![
        write_csv(&ctx.out, "spectra_aoa.csv", &aoa)?,
        write_csv(&ctx.out, "spectra_aod.csv", &aod)?,
        write_csv(&ctx.out, "spectra_delay.csv", &delay)?,
        write_csv(&ctx.out, "peaks.csv", &peaks)?,
    ];
    ctx.finish("spectra", &cfg, json!({ "method": method.tag() }), files)
}

/// Pilot kinds accepted by `design`: every trial method plus the scenario's fake-path plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignKind {
    Method(Method),
    FakePaths,
}

impl DesignKind {
    pub fn parse(tag: &str) -> AppResult<Self> {
        if tag == "fake_paths" {
            return Ok(DesignKind::FakePaths);
        }
        Method::from_tag(tag).map(DesignKind::Method).map_err(|e| AppError::Config(format!("{e} or fake_paths")))
    }

    pub fn tag(self) -> &'static str {
        match self {
            DesignKind::Method(m) => m.tag(),
            DesignKind::FakePaths => "fake_paths",
        }
    }
}

fn design_pilot(ctx: &Context, cfg: &TrialConfig, books: &Codebooks, kind: DesignKind) -> AppResult<(PilotTensor, Vec<DesignRow>)> {
    let sys = &cfg.system;
    let row = |q: &str, v: f64| DesignRow { quantity: q.into(), value: v };
    let alpha = path_gains(&cfg.truth, &cfg.gain, &mut trial_rng(cfg.base_seed, 0, Stream::Gains))?;
    let truth = forward_params(&cfg.truth)?.with_gains(&alpha);
    let target = forward_params(&cfg.target)?;
    let mut rows = Vec::new();
    let pilot = match kind {
        DesignKind::Method(Method::NoSpoof | Method::Dais) => PilotTensor::nominal(sys),
        DesignKind::Method(Method::Oracle) => {
            let spoof = SpoofTarget::with_plausible_gains(cfg.target.clone(), &alpha, &cfg.gain)?;
            let d = design_full_pilot_tensor(&truth, &spoof, books, sys)?;
            let mut observed = spoof.params.clone();
            for p in &mut observed.paths {
                p.gain *= d.lambda_scale;
            }
            let h_target = holotrace_core::channel::channel_tensor(&observed, books, sys).norm_sqr();
            let r = spoof_residual(&d.pilot.entries, &truth, &observed, books, sys)?;
            rows.push(row("lambda_scale", d.lambda_scale));
            rows.push(row("relative_residual", r.value / h_target));
            d.pilot
        }
        DesignKind::Method(m @ (Method::Blind | Method::AngleOnlyBlind)) => {
            let mode = if m == Method::Blind { BlindMode::Full } else { BlindMode::AngleOnly };
            let d = design_blind_full(&truth, &target, books, sys, &cfg.alternating, mode)?;
            for (name, alt) in [("aoa_residual", &d.aoa), ("aod_residual", &d.aod)] {
                if let Some(a) = alt {
                    rows.push(row(name, a.final_residual()));
                }
            }
            d.pilot
        }
        DesignKind::FakePaths => {
            let plan = ctx
                .scenario
                .fake_path_plan()?
                .ok_or_else(|| AppError::Config("the scenario has no spoof.fake_paths entries".into()))?;
            let ones = |n| vec![Complex64::new(1.0, 0.0); n];
            let x_d = fake_path_pilot(&plan, sys.n_subcarriers, sys.subcarrier_spacing_hz)?;
            let mut p = blind_kronecker_pilot(&ones(sys.n_combiners), &ones(sys.n_precoders), &x_d, sys)?;
            rows.push(row("lambda_scale", p.normalize_to_budget()));
            p
        }
    };
    rows.insert(0, row("energy", pilot.energy()));
    rows.insert(1, row("energy_budget", pilot.energy_budget));
    Ok((pilot, rows))
}

/// Designs the pilot of trial 0 and dumps it as `pilot.bin`.
pub fn design(ctx: &Context, kind: DesignKind) -> AppResult<Vec<PathBuf>> {
    let cfg = ctx.trial_config()?;
    let books = build_codebooks(&cfg.system);
    let (pilot, rows) = design_pilot(ctx, &cfg, &books, kind)?;
    std::fs::create_dir_all(&ctx.out)?;
    let bin = ctx.out.join("pilot.bin");
    write_tensor(BufWriter::new(File::create(&bin)?), &pilot.entries)?;
    let files = vec![bin, write_csv(&ctx.out, "design.csv", &rows)?];
    ctx.finish("design", &cfg, json!({ "method": kind.tag() }), files)
}

fn estimation_rows(ctx: &Context, method: Method, trials: usize) -> AppResult<(TrialConfig, Vec<EstimationRow>, Vec<PositionRow>)> {
    let cfg = ctx.trial_config()?;
    let books = build_codebooks(&cfg.system);
    let (mut est, mut pos) = (Vec::new(), Vec::new());
    for (id, o) in run_trials(&cfg, &books, method, trials).into_iter().enumerate() {
        let o = o?;
        let id = id as u64;
        est.extend(o.estimate.paths.iter().enumerate().map(|(i, p)| EstimationRow {
            trial_id: id,
            path_index: i,
            tau_s: p.delay_s,
            aoa_rad: p.aoa_rad,
            aod_rad: p.aod_rad,
            peak_power: p.peak_power,
        }));
        let p = estimate_position(&o.estimate, &cfg.truth.bs);
        pos.push(PositionRow {
            trial_id: id,
            x_m: p.map(|p| p.position[0]),
            y_m: p.map(|p| p.position[1]),
            d0_m: p.map(|p| p.d0_m),
            valid: o.is_valid(),
        });
    }
    Ok((cfg, est, pos))
}

/// Runs the estimator on `trials` trials and writes `estimation.csv`.
pub fn estimate(ctx: &Context, method: Method, trials: usize) -> AppResult<Vec<PathBuf>> {
    let (cfg, est, _) = estimation_rows(ctx, method, trials)?;
    let files = vec![write_csv(&ctx.out, "estimation.csv", &est)?];
    ctx.finish("estimate", &cfg, json!({ "method": method.tag(), "trials": trials }), files)
}

/// Estimates and localizes `trials` trials; writes `position.csv` and `estimation.csv`.
pub fn locate(ctx: &Context, method: Method, trials: usize) -> AppResult<Vec<PathBuf>> {
    let (cfg, est, pos) = estimation_rows(ctx, method, trials)?;
    let files = vec![write_csv(&ctx.out, "position.csv", &pos)?, write_csv(&ctx.out, "estimation.csv", &est)?];
    ctx.finish("locate", &cfg, json!({ "method": method.tag(), "trials": trials }), files)
}

/// Runs an experiment file; writes `results.csv`, `summary.csv` and `deviation.csv`.
pub fn sweep(ctx: &Context, experiment: &ExperimentSpec) -> AppResult<Vec<PathBuf>> {
    let cfg = ctx.trial_config()?;
    let trials = if ctx.full { FULL_TRIALS } else { experiment.trials };
    let report = run_sweep(&cfg, experiment, trials)?;
    let files = vec![
        write_csv(&ctx.out, "results.csv", &report.result_rows())?,
        write_csv(&ctx.out, "summary.csv", &report.summary_rows())?,
        write_csv(&ctx.out, "deviation.csv", &report.deviation_rows())?,
    ];
    ctx.finish("sweep", &cfg, json!({ "experiment": experiment, "trials": trials }), files)
}

/// Where the heatmap is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum HeatmapCells {
    Sector(SectorGrid),
    Points(Vec<Point>),
}

/// Oracle-spoofed rate on the channel of trial 0 for every candidate UE position.
pub fn heatmap_rows(cfg: &TrialConfig, cells: &HeatmapCells) -> AppResult<Vec<HeatmapRow>> {
    let sys: &SystemConfig = &cfg.system;
    if sys.noise_psd_w_per_hz <= 0.0 {
        return Err(AppError::Config("the rate heatmap needs a positive noise density".into()));
    }
    let books = build_codebooks(sys);
    let alpha = path_gains(&cfg.truth, &cfg.gain, &mut trial_rng(cfg.base_seed, 0, Stream::Gains))?;
    let truth = forward_params(&cfg.truth)?.with_gains(&alpha);
    let ctx = HeatmapContext { truth_geometry: &cfg.truth, truth: &truth, gain_cfg: &cfg.gain, books: &books, cfg: sys };
    let points = match cells {
        HeatmapCells::Sector(g) => g.points(&cfg.truth.bs),
        HeatmapCells::Points(p) => p.clone(),
    };
    points
        .par_iter()
        .map(|&p| {
            let rate = spoofed_rate(&ctx, &co_translated_target(&cfg.truth, p))?.rate_bps;
            Ok(HeatmapRow { x_m: p[0], y_m: p[1], rate_bps: rate })
        })
        .collect()
}

/// Writes `heatmap.csv` and `markers.csv`.
pub fn heatmap(ctx: &Context, cells: &HeatmapCells) -> AppResult<Vec<PathBuf>> {
    let cfg = ctx.trial_config()?;
    let rows = heatmap_rows(&cfg, cells)?;
    let marker = |label: &str, p: Point| MarkerRow { label: label.into(), x_m: p[0], y_m: p[1] };
    let markers = vec![
        marker("bs", cfg.truth.bs.position),
        marker("ue", cfg.truth.ue.position),
        marker("target", cfg.target.ue.position),
        marker("target_behind", target_geometry(&cfg, TargetChoice::Behind)?.ue.position),
    ];
    let files = vec![write_csv(&ctx.out, "heatmap.csv", &rows)?, write_csv(&ctx.out, "markers.csv", &markers)?];
    let extra = match cells {
        HeatmapCells::Sector(g) => json!({
            "min_angle_rad": g.min_angle_rad,
            "max_angle_rad": g.max_angle_rad,
            "radius_m": g.radius_m,
            "step_m": g.step_m,
        }),
        HeatmapCells::Points(p) => json!({ "points": p }),
    };
    ctx.finish("heatmap", &cfg, extra, files)
}
