//! Array responses, beam codebooks and the MIMO-OFDM channel tensor.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{cp_tensor, CMatrix};
use crate::scenario::PathParameterSet;
use crate::tensor::Tensor3;
use crate::BOLTZMANN;

/// Thermal noise density at 290 K scaled by a receiver noise figure.
pub fn thermal_noise_psd(noise_figure_db: f64) -> f64 {
    BOLTZMANN * 290.0 * crate::db_to_linear(noise_figure_db)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub n_rx: usize,
    pub n_tx: usize,
    pub n_combiners: usize,
    pub n_precoders: usize,
    pub n_subcarriers: usize,
    pub subcarrier_spacing_hz: f64,
    pub carrier_hz: f64,
    pub noise_psd_w_per_hz: f64,
    pub tx_power_w: f64,
}

impl SystemConfig {
    /// 24x16 arrays with square codebooks, 120 kHz spacing at 27.8 GHz, 35 dBm and thermal
    /// noise, on `n_subcarriers` tones.
    pub fn with_subcarriers(n_subcarriers: usize) -> Self {
        Self {
            n_rx: 24,
            n_tx: 16,
            n_combiners: 24,
            n_precoders: 16,
            n_subcarriers,
            subcarrier_spacing_hz: 120e3,
            carrier_hz: 27.8e9,
            noise_psd_w_per_hz: thermal_noise_psd(0.0),
            tx_power_w: crate::dbm_to_watts(35.0),
        }
    }

    /// Reduced bandwidth (256 tones) for fast experiments.
    pub fn desk() -> Self {
        Self::with_subcarriers(256)
    }

    /// Full 396 MHz bandwidth (3300 tones).
    pub fn full() -> Self {
        Self::with_subcarriers(3300)
    }

    pub fn with_tx_power_dbm(mut self, dbm: f64) -> Self {
        self.tx_power_w = crate::dbm_to_watts(dbm);
        self
    }

    /// Energy per subcarrier `E_s = P_t / (K df)`.
    pub fn symbol_energy(&self) -> f64 {
        self.tx_power_w / (self.n_subcarriers as f64 * self.subcarrier_spacing_hz)
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.n_combiners, self.n_precoders, self.n_subcarriers]
    }

    /// Tensor size `M S K`, also the energy of a unit-modulus pilot.
    pub fn pilot_len(&self) -> usize {
        self.n_combiners * self.n_precoders * self.n_subcarriers
    }

    pub fn has_square_codebooks(&self) -> bool {
        self.n_combiners == self.n_rx && self.n_precoders == self.n_tx
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [self.n_rx, self.n_tx, self.n_combiners, self.n_precoders, self.n_subcarriers];
        if counts.contains(&0) {
            return Err(Error::InvalidConfig("array, codebook and subcarrier counts must be at least 1".into()));
        }
        let positive = [self.subcarrier_spacing_hz, self.carrier_hz, self.tx_power_w];
        if !positive.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::InvalidConfig(
                "subcarrier spacing, carrier and transmit power must be finite and positive".into(),
            ));
        }
        if !(self.noise_psd_w_per_hz.is_finite() && self.noise_psd_w_per_hz >= 0.0) {
            return Err(Error::InvalidConfig(format!("noise density {} must be >= 0", self.noise_psd_w_per_hz)));
        }
        Ok(())
    }
}

/// ULA response `[1, e^{j pi sin a}, ..., e^{j pi (n-1) sin a}]`.
pub fn ula_steering(n: usize, angle_rad: f64) -> Vec<Complex64> {
    let u = PI * angle_rad.sin();
    (0..n).map(|i| Complex64::from_polar(1.0, u * i as f64)).collect()
}

/// Frequency response of a delay, `e^{-j 2 pi k df tau}` for `k = 0..K`.
pub fn delay_steering(k_count: usize, spacing_hz: f64, delay_s: f64) -> Vec<Complex64> {
    let w = -2.0 * PI * spacing_hz * delay_s;
    (0..k_count).map(|k| Complex64::from_polar(1.0, w * k as f64)).collect()
}

/// Receive combiners `W` (`N_R x M`) and transmit precoders `F` (`N_T x S`), unit-norm columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebooks {
    pub combiners: CMatrix,
    pub precoders: CMatrix,
}

impl Codebooks {
    pub fn is_square(&self) -> bool {
        self.combiners.is_square() && self.precoders.is_square()
    }
}

fn dft_codebook(n: usize, beams: usize) -> CMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, beams, |i, b| {
        let phase = 2.0 * PI * ((i * b) % beams) as f64 / beams as f64;
        Complex64::from_polar(scale, phase)
    })
}

/// DFT codebooks; square (and unitary) when `M = N_R` and `S = N_T`.
pub fn build_codebooks(cfg: &SystemConfig) -> Codebooks {
    Codebooks {
        combiners: dft_codebook(cfg.n_rx, cfg.n_combiners),
        precoders: dft_codebook(cfg.n_tx, cfg.n_precoders),
    }
}

fn random_codebook<R: Rng + ?Sized>(n: usize, beams: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::from_fn(n, beams, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    for mut col in m.column_iter_mut() {
        let norm = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        col.iter_mut().for_each(|v| *v /= norm);
    }
    m
}

/// Codebooks with i.i.d. complex Gaussian columns normalized to unit norm.
pub fn random_codebooks<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Codebooks {
    Codebooks {
        combiners: random_codebook(cfg.n_rx, cfg.n_combiners, rng),
        precoders: random_codebook(cfg.n_tx, cfg.n_precoders, rng),
    }
}

/// Beamspace factor matrices of the CP model: `B = W^H A_R`, `C = F^H A_T` and the delay
/// matrix `D`, one column per path.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorMatrices {
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

fn steering_matrix(n: usize, angles: &[f64]) -> CMatrix {
    let cols: Vec<_> = angles.iter().map(|&a| ula_steering(n, a)).collect();
    CMatrix::from_fn(n, angles.len(), |i, l| cols[l][i])
}

/// Beamspace response of a single receive angle, `W^H a(theta)`.
pub fn combiner_response(books: &Codebooks, angle_rad: f64) -> Vec<Complex64> {
    let a = steering_matrix(books.combiners.nrows(), &[angle_rad]);
    (books.combiners.adjoint() * a).iter().copied().collect()
}

/// Beamspace response of a single departure angle, `F^H a(phi)`.
pub fn precoder_response(books: &Codebooks, angle_rad: f64) -> Vec<Complex64> {
    let a = steering_matrix(books.precoders.nrows(), &[angle_rad]);
    (books.precoders.adjoint() * a).iter().copied().collect()
}

pub fn factor_matrices(params: &PathParameterSet, books: &Codebooks, cfg: &SystemConfig) -> FactorMatrices {
    let a_r = steering_matrix(books.combiners.nrows(), &params.aoas());
    let a_t = steering_matrix(books.precoders.nrows(), &params.aods());
    let delays = params.delays();
    let dcols: Vec<_> = delays
        .iter()
        .map(|&t| delay_steering(cfg.n_subcarriers, cfg.subcarrier_spacing_hz, t))
        .collect();
    FactorMatrices {
        b: books.combiners.adjoint() * a_r,
        c: books.precoders.adjoint() * a_t,
        d: DMatrix::from_fn(cfg.n_subcarriers, delays.len(), |k, l| dcols[l][k]),
    }
}

/// Noise-free channel tensor `H[m,s,k] = sqrt(E_s) sum_l alpha_l B[m,l] C[s,l] D[k,l]`.
pub fn channel_tensor(params: &PathParameterSet, books: &Codebooks, cfg: &SystemConfig) -> Tensor3 {
    let f = factor_matrices(params, books, cfg);
    let es = cfg.symbol_energy().sqrt();
    let w: Vec<_> = params.gains().iter().map(|g| g * es).collect();
    cp_tensor(&f.b, &f.c, &f.d, &w)
}

/// Pilot symbols over (combiner, precoder, subcarrier) with the total-energy budget they must respect.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotTensor {
    pub entries: Tensor3,
    pub energy_budget: f64,
}

impl PilotTensor {
    /// Unit-modulus all-ones pilot with budget `M S K`.
    pub fn nominal(cfg: &SystemConfig) -> Self {
        let entries = Tensor3::filled(cfg.dims(), Complex64::new(1.0, 0.0));
        Self { entries, energy_budget: cfg.pilot_len() as f64 }
    }

    /// Wraps `entries` with the default budget (its element count).
    pub fn new(entries: Tensor3) -> Self {
        let energy_budget = entries.len() as f64;
        Self { entries, energy_budget }
    }

    pub fn energy(&self) -> f64 {
        self.entries.norm_sqr()
    }

    /// Rescales the pilot so its energy equals the budget exactly, returning the applied
    /// scale. A zero pilot is left untouched and reports a scale of 1.
    pub fn normalize_to_budget(&mut self) -> f64 {
        let e = self.energy();
        if e == 0.0 {
            return 1.0;
        }
        let scale = (self.energy_budget / e).sqrt();
        self.entries.scale(Complex64::new(scale, 0.0));
        scale
    }
}

/// Noisy observation `Y = H (.) X + Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedTensor {
    pub entries: Tensor3,
}

/// Draws `Y = H (.) X + Q` with `Q` i.i.d. circular Gaussian of variance `N_0` per entry.
pub fn synthesize_received<R: Rng + ?Sized>(
    h: &Tensor3,
    x: &PilotTensor,
    cfg: &SystemConfig,
    rng: &mut R,
) -> Result<ReceivedTensor> {
    if h.dims() != cfg.dims() {
        return Err(Error::DimensionMismatch { expected: cfg.dims(), found: h.dims() });
    }
    let mut y = h.hadamard(&x.entries)?;
    let sigma = (cfg.noise_psd_w_per_hz / 2.0).sqrt();
    if sigma > 0.0 {
        for v in y.as_mut_slice() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *v += Complex64::new(sigma * re, sigma * im);
        }
    }
    Ok(ReceivedTensor { entries: y })
}
