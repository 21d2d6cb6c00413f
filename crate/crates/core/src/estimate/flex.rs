//! Periodogram / CFAR / phase compensation / ESPRIT path extraction.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::cfar::{cfar_detect, CfarConfig};
use super::esprit::esprit_sine;
use super::spectrum::{angle_grid, delay_periodogram};
use crate::channel::{combiner_response, delay_steering, precoder_response, Codebooks, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scenario::{wrap_angle, PathParameterSet, PathParams};
use crate::tensor::Tensor3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlexConfig {
    pub cfar: CfarConfig,
    /// Upper bound on extracted paths.
    pub max_paths: usize,
    /// Upper bound on re-estimation sweeps over all paths after extraction; sweeps stop early
    /// once no delay moves by more than `1e-6` bins.
    pub relax_passes: usize,
    /// Candidates weaker than this fraction of the strongest initial periodogram bin are ignored.
    pub dynamic_range: f64,
    /// Candidates closer than this many bins to an extracted path are ignored.
    pub min_separation_bins: f64,
    /// Grid step of the matched-filter fallback for non-square codebooks.
    pub angle_grid_step: f64,
    /// Paths whose ESPRIT rotation deviates from unit modulus by more than this are flagged.
    pub esprit_tolerance: f64,
}

impl Default for FlexConfig {
    fn default() -> Self {
        Self {
            cfar: CfarConfig::default(),
            max_paths: 6,
            relax_passes: 10,
            dynamic_range: 1e-8,
            min_separation_bins: 1.0,
            angle_grid_step: 1e-3,
            esprit_tolerance: 0.2,
        }
    }
}

impl FlexConfig {
    pub fn validate(&self) -> Result<()> {
        self.cfar.validate()?;
        if self.max_paths == 0 || !(self.dynamic_range >= 0.0 && self.dynamic_range < 1.0) {
            return Err(Error::InvalidConfig("estimator needs max_paths >= 1 and 0 <= dynamic_range < 1".into()));
        }
        if !(self.angle_grid_step > 0.0 && self.min_separation_bins >= 0.0 && self.esprit_tolerance > 0.0) {
            return Err(Error::InvalidConfig("estimator grid step, separation and tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatedPath {
    pub delay_s: f64,
    pub aoa_rad: f64,
    pub aod_rad: f64,
    /// Least-squares gain including the symbol-energy factor.
    pub gain: Complex64,
    /// Periodogram power of the path at its refined delay.
    pub peak_power: f64,
    /// False when angle recovery was numerically doubtful.
    pub reliable: bool,
}

/// Extracted paths sorted by delay.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EstimationResult {
    pub paths: Vec<EstimatedPath>,
}

impl EstimationResult {
    pub fn detected_count(&self) -> usize {
        self.paths.len()
    }

    pub fn delays(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.delay_s).collect()
    }

    /// The estimate as a parameter set (gains included).
    pub fn params(&self) -> PathParameterSet {
        PathParameterSet {
            paths: self
                .paths
                .iter()
                .map(|p| PathParams { delay_s: p.delay_s, aoa_rad: p.aoa_rad, aod_rad: p.aod_rad, gain: p.gain })
                .collect(),
        }
    }
}

struct Extractor<'a> {
    books: &'a Codebooks,
    cfg: &'a SystemConfig,
    flex: &'a FlexConfig,
    /// `(W^H)^-1` and `(conj F)^-1` when both codebooks are square and invertible.
    element_map: Option<(CMatrix, CMatrix)>,
    omega: f64,
    bin: f64,
}

impl<'a> Extractor<'a> {
    fn new(books: &'a Codebooks, cfg: &'a SystemConfig, flex: &'a FlexConfig) -> Self {
        let element_map = if books.is_square() {
            let w = books.combiners.adjoint().try_inverse();
            let f = books.precoders.map(|v| v.conj()).try_inverse();
            w.zip(f)
        } else {
            None
        };
        Self {
            books,
            cfg,
            flex,
            element_map,
            omega: 2.0 * PI * cfg.subcarrier_spacing_hz,
            bin: 1.0 / (cfg.n_subcarriers as f64 * cfg.subcarrier_spacing_hz),
        }
    }

    /// `J(tau) = sum_{m,s} |sum_k r e^{j w k tau}|^2` and its first two derivatives.
    fn objective(&self, r: &Tensor3, tau: f64, derivatives: bool) -> (f64, f64, f64) {
        let [m, s, k] = r.dims();
        let phasors: Vec<Complex64> =
            (0..k).map(|kk| Complex64::from_polar(1.0, self.omega * kk as f64 * tau)).collect();
        let (mut j0, mut j1, mut j2) = (0.0, 0.0, 0.0);
        for mi in 0..m {
            for si in 0..s {
                let fiber = r.fiber(mi, si);
                if !derivatives {
                    let z: Complex64 = fiber.iter().zip(&phasors).map(|(a, p)| a * p).sum();
                    j0 += z.norm_sqr();
                    continue;
                }
                let (mut z, mut z1, mut z2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for (kk, (a, p)) in fiber.iter().zip(&phasors).enumerate() {
                    let t = a * p;
                    let wk = self.omega * kk as f64;
                    z += t;
                    z1 += t * Complex64::new(0.0, wk);
                    z2 -= t * (wk * wk);
                }
                j0 += z.norm_sqr();
                j1 += 2.0 * (z.conj() * z1).re;
                j2 += 2.0 * (z1.norm_sqr() + (z.conj() * z2).re);
            }
        }
        (j0, j1, j2)
    }

    /// Maximizes `J` within `+-0.6` bins of `tau0`: golden-section search, then Newton steps.
    fn refine_delay(&self, r: &Tensor3, tau0: f64) -> f64 {
        let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (tau0 - 0.6 * self.bin, tau0 + 0.6 * self.bin);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = self.objective(r, c, false).0;
        let mut fd = self.objective(r, d, false).0;
        for _ in 0..24 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = self.objective(r, c, false).0;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = self.objective(r, d, false).0;
            }
        }
        let mut tau = if fc > fd { c } else { d };
        let (lo, hi) = (tau0 - 0.6 * self.bin, tau0 + 0.6 * self.bin);
        let (mut j, mut j1, mut j2) = self.objective(r, tau, true);
        for _ in 0..4 {
            if !(j2 < 0.0) {
                break;
            }
            let next = tau - j1 / j2;
            if !(next > lo && next < hi) {
                break;
            }
            let (nj, nj1, nj2) = self.objective(r, next, true);
            if nj < j {
                break;
            }
            let converged = (next - tau).abs() < 1e-9 * self.bin;
            tau = next;
            (j, j1, j2) = (nj, nj1, nj2);
            if converged {
                break;
            }
        }
        tau
    }

    fn mf_angles(&self, g: &CMatrix) -> (f64, f64) {
        let grid = angle_grid(self.flex.angle_grid_step);
        let best = |score: &dyn Fn(f64) -> f64| {
            grid.iter().copied().fold((f64::NEG_INFINITY, 0.0), |(bv, ba), a| {
                let v = score(a);
                if v > bv {
                    (v, a)
                } else {
                    (bv, ba)
                }
            })
            .1
        };
        let aoa = best(&|a| {
            let b = combiner_response(self.books, a);
            let nb: f64 = b.iter().map(|v| v.norm_sqr()).sum();
            let mut p = 0.0;
            for s in 0..g.ncols() {
                let z: Complex64 = (0..g.nrows()).map(|m| b[m].conj() * g[(m, s)]).sum();
                p += z.norm_sqr();
            }
            p / nb
        });
        let aod = best(&|a| {
            let c = precoder_response(self.books, a);
            let nc: f64 = c.iter().map(|v| v.norm_sqr()).sum();
            let mut p = 0.0;
            for m in 0..g.nrows() {
                let z: Complex64 = (0..g.ncols()).map(|s| c[s].conj() * g[(m, s)]).sum();
                p += z.norm_sqr();
            }
            p / nc
        });
        (aoa, aod)
    }

    /// Angles from the dominant singular pair of the element-space slice.
    fn esprit_angles(&self, g: &CMatrix) -> Option<(f64, f64, bool)> {
        let (wmap, fmap) = self.element_map.as_ref()?;
        let e = wmap * g * fmap;
        let svd = e.svd(true, true);
        let (u, vt) = (svd.u?, svd.v_t?);
        let i = (0..svd.singular_values.len())
            .fold(0, |b, i| if svd.singular_values[i] > svd.singular_values[b] { i } else { b });
        let ucol: Vec<Complex64> = u.column(i).iter().copied().collect();
        // E ~ a_R a_T^T, so row i of V^H is proportional to a_T^T.
        let vrow: Vec<Complex64> = vt.row(i).iter().copied().collect();
        let ea = esprit_sine(&ucol)?;
        let ed = esprit_sine(&vrow)?;
        let tol = self.flex.esprit_tolerance;
        let reliable = ea.modulus_error() <= tol && ed.modulus_error() <= tol;
        Some((ea.angle(), ed.angle(), reliable))
    }

    /// Angles and gain of the dominant steering pair in a compensated slice.
    fn path_from_slice(&self, g: &CMatrix, tau: f64) -> EstimatedPath {
        let (aoa, aod, reliable) = match self.esprit_angles(g) {
            Some(v) => v,
            None => {
                let (a, d) = self.mf_angles(g);
                (a, d, self.element_map.is_none())
            }
        };
        let b = combiner_response(self.books, aoa);
        let c = precoder_response(self.books, aod);
        let nb: f64 = b.iter().map(|v| v.norm_sqr()).sum();
        let nc: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..g.nrows() {
            for s in 0..g.ncols() {
                acc += (b[m] * c[s]).conj() * g[(m, s)];
            }
        }
        let gain = if nb * nc > 0.0 { acc / (nb * nc) } else { Complex64::new(0.0, 0.0) };
        let k = self.cfg.n_subcarriers as f64;
        let peak_power = k * g.norm_squared() / (g.nrows() * g.ncols()) as f64;
        EstimatedPath { delay_s: tau, aoa_rad: wrap_angle(aoa), aod_rad: wrap_angle(aod), gain, peak_power, reliable }
    }

    /// Least-squares beamspace slices `G_i` of `y ~ sum_i G_i d(tau_i)^T`, fitted jointly so
    /// that leakage between nearby delays is shared out correctly.
    fn joint_slices(&self, y: &Tensor3, delays: &[f64]) -> Vec<CMatrix> {
        let [m, s, k] = y.dims();
        let l = delays.len();
        let d: Vec<Vec<Complex64>> =
            delays.iter().map(|&t| delay_steering(k, self.cfg.subcarrier_spacing_hz, t)).collect();
        let gram = CMatrix::from_fn(l, l, |i, j| (0..k).map(|kk| d[i][kk].conj() * d[j][kk]).sum());
        let inv = gram
            .clone()
            .try_inverse()
            .or_else(|| gram.pseudo_inverse(1e-12).ok())
            .unwrap_or_else(|| CMatrix::zeros(l, l));
        let mut out = alloc::vec![CMatrix::zeros(m, s); l];
        let mut proj = alloc::vec![Complex64::new(0.0, 0.0); l];
        for mi in 0..m {
            for si in 0..s {
                let fiber = y.fiber(mi, si);
                for (i, p) in proj.iter_mut().enumerate() {
                    *p = d[i].iter().zip(fiber).map(|(a, v)| a.conj() * v).sum();
                }
                for (i, g) in out.iter_mut().enumerate() {
                    g[(mi, si)] = (0..l).map(|j| inv[(i, j)] * proj[j]).sum();
                }
            }
        }
        out
    }

    /// One sweep re-refining each delay against the signal with all other components removed.
    /// Returns the largest delay change in bins.
    fn relax(&self, y: &Tensor3, delays: &mut [f64], slices: &mut Vec<CMatrix>) -> f64 {
        let mut moved = 0.0f64;
        for i in 0..delays.len() {
            let own = self.residual(y, slices, delays, Some(i));
            let t = self.refine_delay(&own, delays[i]);
            moved = moved.max((t - delays[i]).abs() / self.bin);
            delays[i] = t;
            *slices = self.joint_slices(y, delays);
        }
        moved
    }

    /// `y - sum_i G_i d(tau_i)^T` over the components with `skip` excluded.
    fn residual(&self, y: &Tensor3, slices: &[CMatrix], delays: &[f64], skip: Option<usize>) -> Tensor3 {
        let mut r = y.clone();
        let [m, s, k] = y.dims();
        for (i, (g, &t)) in slices.iter().zip(delays).enumerate() {
            if Some(i) == skip {
                continue;
            }
            let d = delay_steering(k, self.cfg.subcarrier_spacing_hz, t);
            for mi in 0..m {
                for si in 0..s {
                    let coef = g[(mi, si)];
                    for (v, dk) in r.fiber_mut(mi, si).iter_mut().zip(&d) {
                        *v -= coef * dk;
                    }
                }
            }
        }
        r
    }
}

/// Estimates delays, angles and gains of the dominant paths in `y`.
///
/// Returns an empty result when nothing is detected.
pub fn flex_estimate(y: &Tensor3, books: &Codebooks, cfg: &SystemConfig, flex: &FlexConfig) -> Result<EstimationResult> {
    if y.dims() != cfg.dims() {
        return Err(Error::DimensionMismatch { expected: cfg.dims(), found: y.dims() });
    }
    if books.combiners.ncols() != cfg.n_combiners || books.precoders.ncols() != cfg.n_precoders {
        return Err(Error::InvalidConfig("codebook sizes do not match the system config".into()));
    }
    let x = Extractor::new(books, cfg, flex);
    let k = cfg.n_subcarriers;
    let mut delays: Vec<f64> = Vec::new();
    // Cancellation subtracts the whole beamspace slice seen at each delay, not a rank-one fit.
    let mut slices: Vec<CMatrix> = Vec::new();
    let mut residual = y.clone();
    let mut reference: Option<f64> = None;

    while delays.len() < flex.max_paths {
        let p = delay_periodogram(&residual, cfg);
        let detections = cfar_detect(&p.power, &flex.cfar)?;
        let floor = flex.dynamic_range * *reference.get_or_insert_with(|| p.power.iter().copied().fold(0.0, f64::max));
        let candidate = detections
            .into_iter()
            .filter(|&n| p.power[n] > floor && p.power[n] > 0.0)
            .filter(|&n| {
                delays.iter().all(|&t| {
                    let dist = num_traits::Euclid::rem_euclid(&(n as f64 - t / x.bin), &(k as f64));
                    dist.min(k as f64 - dist) > flex.min_separation_bins
                })
            })
            .max_by(|&a, &b| p.power[a].total_cmp(&p.power[b]));
        let Some(n) = candidate else { break };

        let (l, c, r) = (p.power[(n + k - 1) % k], p.power[n], p.power[(n + 1) % k]);
        let curv = l - 2.0 * c + r;
        let delta = if curv < 0.0 { (0.5 * (l - r) / curv).clamp(-0.5, 0.5) } else { 0.0 };
        delays.push(x.refine_delay(&residual, (n as f64 + delta) * x.bin));
        slices = x.joint_slices(y, &delays);
        if delays.len() > 1 {
            x.relax(y, &mut delays, &mut slices);
        }
        residual = x.residual(y, &slices, &delays, None);
    }

    for _ in 0..flex.relax_passes {
        if x.relax(y, &mut delays, &mut slices) < 1e-6 {
            break;
        }
    }

    let mut paths: Vec<EstimatedPath> = slices.iter().zip(&delays).map(|(g, &t)| x.path_from_slice(g, t)).collect();
    paths.sort_by(|a, b| a.delay_s.total_cmp(&b.delay_s));
    Ok(EstimationResult { paths })
}
