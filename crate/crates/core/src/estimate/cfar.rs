//! Cell-averaging CFAR detection on a circular power sequence.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfarConfig {
    /// Cells skipped on each side of the cell under test.
    pub guard_cells: usize,
    /// Averaging cells on each side, outside the guard cells.
    pub training_cells: usize,
    /// Design false-alarm probability for exponentially distributed noise cells.
    pub pfa: f64,
}

impl Default for CfarConfig {
    fn default() -> Self {
        Self { guard_cells: 2, training_cells: 16, pfa: 1e-4 }
    }
}

impl CfarConfig {
    pub fn validate(&self) -> Result<()> {
        if self.training_cells == 0 || !(self.pfa > 0.0 && self.pfa < 1.0) {
            return Err(Error::InvalidConfig("CFAR needs training_cells >= 1 and 0 < pfa < 1".into()));
        }
        Ok(())
    }

    /// Cells spanned by the full window, cell under test included.
    pub fn window(&self) -> usize {
        2 * (self.guard_cells + self.training_cells) + 1
    }
}

/// CA-CFAR multiplier `N (pfa^(-1/N) - 1)` for `N` training cells in total.
pub fn cfar_threshold_factor(total_training: usize, pfa: f64) -> f64 {
    let n = total_training as f64;
    n * (pfa.powf(-1.0 / n) - 1.0)
}

/// Returns the indices of detected cells, one per run of adjacent detections (its maximum),
/// in ascending order. The window wraps around the ends of `power`.
pub fn cfar_detect(power: &[f64], cfg: &CfarConfig) -> Result<Vec<usize>> {
    cfg.validate()?;
    let len = power.len();
    let window = cfg.window();
    if window > len {
        return Err(Error::DegenerateWindow { len, window });
    }
    let alpha = cfar_threshold_factor(2 * cfg.training_cells, cfg.pfa);
    let total: f64 = 2.0 * cfg.training_cells as f64;
    let hit: Vec<bool> = (0..len)
        .map(|i| {
            let mut sum = 0.0;
            for off in cfg.guard_cells + 1..=cfg.guard_cells + cfg.training_cells {
                sum += power[(i + off) % len] + power[(i + len - off) % len];
            }
            power[i] > alpha * sum / total
        })
        .collect();

    if hit.iter().all(|&h| h) {
        let best = (0..len).fold(0, |b, i| if power[i] > power[b] { i } else { b });
        return Ok(alloc::vec![best]);
    }
    // Walk runs starting just after a non-detection so that wrapped runs stay whole.
    let start = (0..len).find(|&i| !hit[i]).unwrap_or(0);
    let mut out = Vec::new();
    let mut i = 0;
    while i < len {
        let idx = (start + i) % len;
        if hit[idx] {
            let mut best = idx;
            while i < len && hit[(start + i) % len] {
                let j = (start + i) % len;
                if power[j] > power[best] {
                    best = j;
                }
                i += 1;
            }
            out.push(best);
        } else {
            i += 1;
        }
    }
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp1};

    #[test]
    fn false_alarm_rate_matches_design() {
        let cfg = CfarConfig { pfa: 1e-3, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let noise: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
        // Count raw threshold crossings (before run merging) to measure the per-cell rate.
        let alpha = cfar_threshold_factor(32, cfg.pfa);
        let mut hits = 0usize;
        for i in 0..n {
            let mut sum = 0.0;
            for off in 3..=18 {
                sum += noise[(i + off) % n] + noise[(i + n - off) % n];
            }
            if noise[i] > alpha * sum / 32.0 {
                hits += 1;
            }
        }
        let rate = hits as f64 / n as f64;
        assert!(rate > 0.5e-3 && rate < 2e-3, "rate {rate}");
        let det = cfar_detect(&noise, &cfg).unwrap();
        assert!(det.len() <= hits);
    }

    #[test]
    fn single_and_double_peaks() {
        let mut p = vec![1.0; 256];
        p[100] = 1e4;
        p[101] = 5e3;
        assert_eq!(cfar_detect(&p, &CfarConfig::default()).unwrap(), vec![100]);
        p[30] = 1e3;
        assert_eq!(cfar_detect(&p, &CfarConfig::default()).unwrap(), vec![30, 100]);
    }

    #[test]
    fn wrapped_run_is_merged() {
        let mut p = vec![1.0; 64];
        p[63] = 1e5;
        p[0] = 2e5;
        assert_eq!(cfar_detect(&p, &CfarConfig::default()).unwrap(), vec![0]);
    }

    #[test]
    fn window_larger_than_spectrum_is_an_error() {
        let p = vec![1.0; 20];
        assert!(matches!(cfar_detect(&p, &CfarConfig::default()), Err(Error::DegenerateWindow { len: 20, window: 37 })));
    }
}
