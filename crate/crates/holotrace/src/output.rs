//! CSV row types and the run manifest.
//!
//! Every file has a header row. Missing values (no estimate, undefined RMSE) are empty
//! fields. Units: radians, seconds, meters, bits/s, watts.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::AppResult;

/// Maps NaN and infinities to an empty CSV field.
pub fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleSpectrumRow {
    pub signal: String,
    pub angle_rad: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelaySpectrumRow {
    pub signal: String,
    pub delay_s: f64,
    pub power: f64,
}

/// Global maximum of one spectrum; `x` is in the unit of that spectrum's grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakRow {
    pub signal: String,
    pub dim: String,
    pub index: usize,
    pub x: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationRow {
    pub trial_id: u64,
    pub path_index: usize,
    pub tau_s: f64,
    pub aoa_rad: f64,
    pub aod_rad: f64,
    pub peak_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositionRow {
    pub trial_id: u64,
    pub x_m: Option<f64>,
    pub y_m: Option<f64>,
    pub d0_m: Option<f64>,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapRow {
    pub x_m: f64,
    pub y_m: f64,
    pub rate_bps: f64,
}

/// Reference points drawn on top of the heatmap (`bs`, `ue`, `target`, `target_behind`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkerRow {
    pub label: String,
    pub x_m: f64,
    pub y_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignRow {
    pub quantity: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub axis_value: f64,
    pub method: String,
    pub target: String,
    pub trial_id: u64,
    pub status: String,
    pub x_m: Option<f64>,
    pub y_m: Option<f64>,
    pub eps_est_m: Option<f64>,
    pub eps_dev_m: Option<f64>,
    pub detected_paths: Option<usize>,
    pub rate_bps: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub axis: String,
    pub axis_value: f64,
    pub method: String,
    pub target: String,
    pub trials: usize,
    pub valid: usize,
    pub no_estimate: usize,
    pub degenerate: usize,
    pub out_of_coverage: usize,
    pub failed: usize,
    pub rmse_est_m: Option<f64>,
    pub rmse_dev_m: Option<f64>,
    pub eps_off_m: f64,
    pub mean_rate_bps: Option<f64>,
    pub mean_perfect_csi_rate_bps: Option<f64>,
    pub first_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationRow {
    pub axis_value: f64,
    pub method: String,
    pub target: String,
    pub path_index: usize,
    pub rmse_aoa_rad: Option<f64>,
    pub rmse_aod_rad: Option<f64>,
    pub rmse_delay_s: Option<f64>,
}

/// Writes `rows` to `dir/name`, creating `dir` if needed, and returns the file path.
pub fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> AppResult<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(path)
}

/// Written as `manifest.json` next to the outputs of every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub full: bool,
    pub output_dir: PathBuf,
    /// Resolved inputs, defaults filled in.
    pub config: serde_json::Value,
    pub files: Vec<String>,
}

impl RunManifest {
    pub fn write(&self) -> AppResult<PathBuf> {
        fs::create_dir_all(&self.output_dir)?;
        let path = self.output_dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_values_are_empty_fields() {
        let dir = tempfile::tempdir().unwrap();
        let row = PositionRow { trial_id: 4, x_m: None, y_m: Some(1.5), d0_m: finite(f64::NAN), valid: false };
        let path = write_csv(dir.path(), "position.csv", &[row]).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(text, "trial_id,x_m,y_m,d0_m,valid\n4,,1.5,,false\n");
    }
}
