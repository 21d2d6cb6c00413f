//! Matched-filter spectra and the delay periodogram.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::fft::InverseDft;
use crate::channel::{combiner_response, precoder_response, Codebooks, SystemConfig};
use crate::linalg::{dot_h, norm_sqr, CMatrix};
use crate::tensor::Tensor3;

/// Power over a strictly increasing parameter grid (radians or seconds).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: Vec<f64>,
    pub power: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the global maximum (first one on ties).
    pub fn argmax_index(&self) -> usize {
        (0..self.power.len()).fold(0, |best, i| if self.power[i] > self.power[best] { i } else { best })
    }

    /// Grid value at the global maximum.
    pub fn argmax(&self) -> f64 {
        self.grid[self.argmax_index()]
    }

    /// Up to `count` local maxima, strongest first. A point counts as a local maximum when it
    /// is at least as large as both neighbours and strictly larger than one of them.
    pub fn peaks(&self, count: usize) -> Vec<usize> {
        let p = &self.power;
        let n = p.len();
        let mut idx: Vec<usize> = (0..n)
            .filter(|&i| {
                let left = if i > 0 { p[i - 1] } else { f64::NEG_INFINITY };
                let right = if i + 1 < n { p[i + 1] } else { f64::NEG_INFINITY };
                p[i] >= left && p[i] >= right && (p[i] > left || p[i] > right)
            })
            .collect();
        idx.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
        idx.truncate(count);
        idx
    }
}

/// Generic matched filter: `power[i] = |d(grid[i])^H y|^2 / ||d(grid[i])||^2`.
pub fn mf_spectrum(y: &[Complex64], dictionary: impl Fn(f64) -> Vec<Complex64>, grid: &[f64]) -> Spectrum {
    let power = grid
        .iter()
        .map(|&g| {
            let d = dictionary(g);
            let e = norm_sqr(&d);
            if e > 0.0 {
                dot_h(&d, y).norm_sqr() / e
            } else {
                0.0
            }
        })
        .collect();
    Spectrum { grid: grid.to_vec(), power }
}

/// Uniform grid over `[-pi/2, pi/2]` with the given step.
pub fn angle_grid(step: f64) -> Vec<f64> {
    let n = (core::f64::consts::PI / step).floor() as usize;
    (0..=n).map(|i| -FRAC_PI_2 + i as f64 * step).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleDomain {
    /// Receive side: dictionary `W^H a(theta)`.
    Arrival,
    /// Transmit side: dictionary `F^H a(phi)`.
    Departure,
}

fn beam_response(books: &Codebooks, domain: AngleDomain, angle: f64) -> Vec<Complex64> {
    match domain {
        AngleDomain::Arrival => combiner_response(books, angle),
        AngleDomain::Departure => precoder_response(books, angle),
    }
}

/// Matched-filter angle spectrum of one beamspace snapshot (length `M` or `S`).
pub fn mf_angle_spectrum(y: &[Complex64], books: &Codebooks, domain: AngleDomain, step: f64) -> Spectrum {
    mf_spectrum(y, |a| beam_response(books, domain, a), &angle_grid(step))
}

/// Angle spectrum of a full tensor, summing matched-filter power over all snapshots of the
/// other two dimensions. Evaluated through the beamspace sample covariance.
pub fn tensor_angle_spectrum(y: &Tensor3, books: &Codebooks, domain: AngleDomain, step: f64) -> Spectrum {
    let [m, s, k] = y.dims();
    let n = if domain == AngleDomain::Arrival { m } else { s };
    let mut r = CMatrix::zeros(n, n);
    let mut snap = alloc::vec![Complex64::new(0.0, 0.0); n];
    let (outer, inner) = if domain == AngleDomain::Arrival { (s, m) } else { (m, s) };
    for o in 0..outer {
        for kk in 0..k {
            for (i, v) in snap.iter_mut().enumerate().take(inner) {
                *v = if domain == AngleDomain::Arrival { y[(i, o, kk)] } else { y[(o, i, kk)] };
            }
            for i in 0..n {
                for j in 0..n {
                    r[(i, j)] += snap[i] * snap[j].conj();
                }
            }
        }
    }
    let grid = angle_grid(step);
    let power = grid
        .iter()
        .map(|&a| {
            let d = beam_response(books, domain, a);
            let e = norm_sqr(&d);
            let mut q = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    q += d[i].conj() * r[(i, j)] * d[j];
                }
            }
            if e > 0.0 {
                q.re / e
            } else {
                0.0
            }
        })
        .collect();
    Spectrum { grid, power }
}

/// Matched-filter delay spectrum summed over all `(m, s)` fibres, on a grid oversampled by
/// `oversample` relative to the natural resolution `1 / (K df)`. Power is normalized by `K`.
pub fn tensor_delay_spectrum(y: &Tensor3, cfg: &SystemConfig, oversample: usize) -> Spectrum {
    let [m, s, k] = y.dims();
    let n = k * oversample.max(1);
    let mut dft = InverseDft::new(n);
    let mut power = alloc::vec![0.0; n];
    let mut out = Vec::with_capacity(n);
    for mi in 0..m {
        for si in 0..s {
            dft.process(y.fiber(mi, si), &mut out);
            for (p, v) in power.iter_mut().zip(&out) {
                *p += v.norm_sqr() / k as f64;
            }
        }
    }
    let step = 1.0 / (n as f64 * cfg.subcarrier_spacing_hz);
    Spectrum { grid: (0..n).map(|i| i as f64 * step).collect(), power }
}

/// Bartlett periodogram over the `K` natural delay bins,
/// `P[n] = (1 / MS) sum_{m,s} |IDFT_K(y_{m,s})[n]|^2` with the unitary `1/sqrt(K)` scaling,
/// so that `sum_n P[n]` equals the mean snapshot energy.
pub fn delay_periodogram(y: &Tensor3, cfg: &SystemConfig) -> Spectrum {
    let mut spec = tensor_delay_spectrum(y, cfg, 1);
    let [m, s, _] = y.dims();
    let snapshots = (m * s) as f64;
    spec.power.iter_mut().for_each(|p| *p /= snapshots);
    spec
}
