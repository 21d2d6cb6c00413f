//! Data-parallel Monte Carlo sweeps.
//!
//! Trials run on the rayon pool, but each trial derives its random streams from
//! `(seed, trial_id)` and results are collected in trial order, so the output does not
//! depend on the thread count.

use holotrace_core::channel::{build_codebooks, Codebooks};
use holotrace_core::locate::{perfect_csi_rate, target_behind};
use holotrace_core::rng::{trial_rng, Stream};
use holotrace_core::scenario::{forward_params, path_gains, ScenarioGeometry};
use holotrace_core::trial::{run_trial, spoof_offset, summarize, Method, SweepSummary, TrialConfig, TrialOutcome};
use rayon::prelude::*;

use crate::config::{ExperimentKind, ExperimentSpec, TargetChoice};
use crate::error::AppResult;
use crate::output::{finite, DeviationRow, ResultRow, SummaryRow};

/// All trials of one method against one target at one sweep value.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub target: TargetChoice,
    /// Distance between the true and the spoofed UE for this target.
    pub eps_off_m: f64,
    pub outcomes: Vec<holotrace_core::Result<TrialOutcome>>,
    pub summary: SweepSummary,
    /// Mean perfect-CSI rate over the same channels; `None` without noise.
    pub perfect_csi_rate_bps: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub axis_name: &'static str,
    pub points: Vec<SweepPoint>,
}

/// Resolves a target choice against the configured primary target.
pub fn target_geometry(base: &TrialConfig, choice: TargetChoice) -> AppResult<ScenarioGeometry> {
    Ok(match choice {
        TargetChoice::Primary => base.target.clone(),
        TargetChoice::Behind => target_behind(&base.truth, spoof_offset(&base.truth, &base.target))?,
    })
}

/// Runs trials `0..trials` of one configuration in parallel, in trial order.
pub fn run_trials(cfg: &TrialConfig, books: &Codebooks, method: Method, trials: usize) -> Vec<holotrace_core::Result<TrialOutcome>> {
    (0..trials as u64).into_par_iter().map(|id| run_trial(cfg, books, method, id)).collect()
}

/// Mean perfect-CSI rate over the channels of trials `0..trials`.
pub fn mean_perfect_csi_rate(cfg: &TrialConfig, trials: usize) -> AppResult<Option<f64>> {
    if cfg.system.noise_psd_w_per_hz <= 0.0 {
        return Ok(None);
    }
    let geometry = forward_params(&cfg.truth)?;
    let rates: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|id| {
            let alpha = path_gains(&cfg.truth, &cfg.gain, &mut trial_rng(cfg.base_seed, id, Stream::Gains))?;
            Ok(perfect_csi_rate(&geometry.clone().with_gains(&alpha), &cfg.system)?.rate_bps)
        })
        .collect::<holotrace_core::Result<_>>()?;
    Ok(Some(rates.iter().sum::<f64>() / rates.len() as f64))
}

/// Applies one sweep value to a copy of the base configuration.
fn configure(base: &TrialConfig, exp: &ExperimentSpec, value: f64) -> TrialConfig {
    let mut cfg = base.clone();
    cfg.coverage_radius_m = exp.coverage_radius_m;
    match exp.kind {
        ExperimentKind::Power => cfg.system = cfg.system.with_tx_power_dbm(value),
        ExperimentKind::Uncertainty => {
            if let Some(p) = exp.power_dbm {
                cfg.system = cfg.system.with_tx_power_dbm(p);
            }
            cfg.design_sigma_ue_m = value;
            cfg.design_sigma_sp_m = exp.sigma_sp_m;
        }
    }
    cfg
}

/// Runs every (value, target, method) combination of an experiment. Methods that do not
/// spoof ignore the target, so they only run against the first one.
pub fn run_sweep(base: &TrialConfig, exp: &ExperimentSpec, trials: usize) -> AppResult<SweepReport> {
    exp.validate()?;
    let methods = exp.methods()?;
    let books = build_codebooks(&base.system);
    let path_count = base.truth.path_count();
    let mut points = Vec::new();
    for &value in exp.axis() {
        let cfg = configure(base, exp, value);
        let perfect = mean_perfect_csi_rate(&cfg, trials)?;
        for (ti, &choice) in exp.targets.iter().enumerate() {
            let mut cfg = cfg.clone();
            cfg.target = target_geometry(base, choice)?;
            let eps_off_m = spoof_offset(&cfg.truth, &cfg.target);
            for &method in methods.iter().filter(|m| ti == 0 || m.spoofs()) {
                let outcomes = run_trials(&cfg, &books, method, trials);
                let summary = summarize(method, value, &outcomes, path_count);
                points.push(SweepPoint { axis_value: value, target: choice, eps_off_m, outcomes, summary, perfect_csi_rate_bps: perfect });
            }
        }
    }
    Ok(SweepReport { axis_name: exp.axis_name(), points })
}

impl SweepReport {
    pub fn result_rows(&self) -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for p in &self.points {
            for (id, o) in p.outcomes.iter().enumerate() {
                let base = ResultRow {
                    axis_value: p.axis_value,
                    method: p.summary.method.tag().into(),
                    target: p.target.tag().into(),
                    trial_id: id as u64,
                    status: "error".into(),
                    x_m: None,
                    y_m: None,
                    eps_est_m: None,
                    eps_dev_m: None,
                    detected_paths: None,
                    rate_bps: None,
                    error: None,
                };
                rows.push(match o {
                    Ok(o) => ResultRow {
                        status: o.status.tag().into(),
                        x_m: o.position.map(|q| q[0]),
                        y_m: o.position.map(|q| q[1]),
                        eps_est_m: o.eps_est_m,
                        eps_dev_m: o.eps_dev_m,
                        detected_paths: Some(o.estimate.detected_count()),
                        rate_bps: o.rate_bps,
                        ..base
                    },
                    Err(e) => ResultRow { error: Some(e.to_string()), ..base },
                });
            }
        }
        rows
    }

    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        self.points
            .iter()
            .map(|p| {
                let s = &p.summary;
                SummaryRow {
                    axis: self.axis_name.into(),
                    axis_value: p.axis_value,
                    method: s.method.tag().into(),
                    target: p.target.tag().into(),
                    trials: s.trials,
                    valid: s.valid,
                    no_estimate: s.no_estimate,
                    degenerate: s.degenerate,
                    out_of_coverage: s.out_of_coverage,
                    failed: s.failed,
                    rmse_est_m: finite(s.rmse_est_m),
                    rmse_dev_m: finite(s.rmse_dev_m),
                    eps_off_m: p.eps_off_m,
                    mean_rate_bps: finite(s.mean_rate_bps),
                    mean_perfect_csi_rate_bps: p.perfect_csi_rate_bps,
                    first_error: s.first_error.clone(),
                }
            })
            .collect()
    }

    pub fn deviation_rows(&self) -> Vec<DeviationRow> {
        let mut rows = Vec::new();
        for p in &self.points {
            let s = &p.summary;
            for i in 0..s.rmse_aoa_rad.len() {
                rows.push(DeviationRow {
                    axis_value: p.axis_value,
                    method: s.method.tag().into(),
                    target: p.target.tag().into(),
                    path_index: i,
                    rmse_aoa_rad: finite(s.rmse_aoa_rad[i]),
                    rmse_aod_rad: finite(s.rmse_aod_rad[i]),
                    rmse_delay_s: finite(s.rmse_delay_s[i]),
                });
            }
        }
        rows
    }

    /// The point for a method and target at a sweep value, if it was run.
    pub fn point(&self, method: Method, target: TargetChoice, axis_value: f64) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| p.summary.method == method && p.target == target && p.axis_value == axis_value)
    }
}
