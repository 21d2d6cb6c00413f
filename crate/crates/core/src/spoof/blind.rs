//! Spoofing without knowledge of the complex path gains.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;

use super::checked_ratio;
use crate::channel::{delay_steering, factor_matrices, Codebooks, PilotTensor, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::{khatri_rao, CMatrix};
use crate::scenario::PathParameterSet;
use crate::tensor::Tensor3;

/// Ratio pilot `x = scale * v_spoof / v_true`; independent of the path gain.
pub fn blind_single_path_pilot(
    v_true: &[Complex64],
    v_spoof: &[Complex64],
    scale: Complex64,
) -> Result<Vec<Complex64>> {
    if v_true.len() != v_spoof.len() {
        return Err(Error::DimensionMismatch {
            expected: [v_true.len(), 1, 1],
            found: [v_spoof.len(), 1, 1],
        });
    }
    let mut x = checked_ratio(v_spoof, v_true, |i| [i, 0, 0])?;
    x.iter_mut().for_each(|v| *v *= scale);
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternatingConfig {
    pub max_iters: usize,
    /// Pilot energy `||x||^2`; `None` uses the pilot length.
    pub energy_budget: Option<f64>,
    /// Stop once the relative residual change between sweeps drops below this.
    pub convergence_tol: f64,
}

impl Default for AlternatingConfig {
    fn default() -> Self {
        Self { max_iters: 10, energy_budget: None, convergence_tol: 1e-6 }
    }
}

impl AlternatingConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidConfig("alternating solver needs max_iters >= 1 and tol > 0".into()));
        }
        if let Some(e) = self.energy_budget {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::InvalidConfig(format!("energy budget {e} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingResult {
    pub pilot: Vec<Complex64>,
    /// `Omega`, mapping true-path columns onto combinations of target columns.
    pub mixer: CMatrix,
    /// `||M_spoof Omega - diag(x) M_true||^2` after each sweep.
    pub residual_history: Vec<f64>,
    /// Rows of `M_true` that were identically zero; their pilot entries are 0.
    pub zero_rows: Vec<usize>,
}

impl AlternatingResult {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&0.0)
    }

    /// For each true path, the target path that dominates its column of the mixer. Blind
    /// designs cannot control which true path lands on which target path.
    pub fn permutation(&self) -> Vec<usize> {
        (0..self.mixer.ncols())
            .map(|l| {
                let col = self.mixer.column(l);
                (0..col.len()).fold(0, |best, j| if col[j].norm() > col[best].norm() { j } else { best })
            })
            .collect()
    }
}

/// Solves `sum_m g2_m / (a_m + mu)^2 = energy` for the root with `a_m + mu > 0`.
fn secular_root(a: &[f64], g2: &[f64], energy: f64) -> f64 {
    let f = |mu: f64| a.iter().zip(g2).map(|(a, g)| g / ((a + mu) * (a + mu))).sum::<f64>();
    if (f(0.0) / energy - 1.0).abs() < 1e-13 {
        return 0.0;
    }
    let a_min = a.iter().copied().fold(f64::INFINITY, f64::min);
    let mut lo = -a_min;
    let mut hi = 1.0f64.max(a_min);
    while f(hi) > energy {
        hi *= 2.0;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > energy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Approximate multipath angle spoofing without gains.
///
/// Minimizes `||M_spoof Omega - diag(x) M_true||^2` over the pilot `x` (with `||x||^2` fixed
/// to the energy budget) and the mixing matrix `Omega`, alternating between the two exact
/// block minimizers. The pilot step solves each row's least-squares problem under a shared
/// Lagrange multiplier for the energy constraint, so every sweep is non-increasing.
pub fn blind_multipath_angle_pilot(
    m_true: &CMatrix,
    m_spoof: &CMatrix,
    cfg: &AlternatingConfig,
) -> Result<AlternatingResult> {
    cfg.validate()?;
    let (n, l) = (m_true.nrows(), m_true.ncols());
    let ls = m_spoof.ncols();
    if m_spoof.nrows() != n {
        return Err(Error::DimensionMismatch { expected: [n, ls, 1], found: [m_spoof.nrows(), ls, 1] });
    }
    let svd = m_spoof.clone().svd(true, true);
    let (smax, smin) = svd
        .singular_values
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    if ls > n || !(smin > 1e-10 * smax) {
        return Err(Error::RankDeficient("target factor matrix must have full column rank"));
    }
    let pinv = svd
        .pseudo_inverse(0.0)
        .map_err(|_| Error::RankDeficient("target factor matrix must have full column rank"))?;
    let energy = cfg.energy_budget.unwrap_or(n as f64);

    let row_energy: Vec<f64> = (0..n).map(|m| m_true.row(m).iter().map(|v| v.norm_sqr()).sum()).collect();
    let zero_rows: Vec<usize> = (0..n).filter(|&m| row_energy[m] == 0.0).collect();
    let active: Vec<usize> = (0..n).filter(|&m| row_energy[m] > 0.0).collect();
    if active.is_empty() {
        return Err(Error::RankDeficient("true factor matrix is identically zero"));
    }

    // Row-wise correlations g_m = b_m^H t_m with t_m the m-th row of M_spoof Omega.
    let correlations = |omega: &CMatrix| -> Vec<Complex64> {
        let t = m_spoof * omega;
        (0..n)
            .map(|m| (0..l).map(|j| m_true[(m, j)].conj() * t[(m, j)]).sum())
            .collect()
    };
    let residual = |x: &[Complex64], omega: &CMatrix| -> f64 {
        let t = m_spoof * omega;
        let mut r = 0.0;
        for m in 0..n {
            for j in 0..l {
                r += (t[(m, j)] - x[m] * m_true[(m, j)]).norm_sqr();
            }
        }
        r
    };

    // Start from a scaled identity whose unconstrained row fit already meets the budget, so
    // that the first pilot step reduces to the plain row-wise ratio.
    let mut omega = CMatrix::identity(ls, l);
    let g0 = correlations(&omega);
    let e0: f64 = active.iter().map(|&m| g0[m].norm_sqr() / (row_energy[m] * row_energy[m])).sum();
    if e0 > 0.0 {
        omega *= Complex64::new((energy / e0).sqrt(), 0.0);
    }

    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut history: Vec<f64> = Vec::with_capacity(cfg.max_iters);
    for _ in 0..cfg.max_iters {
        let g = correlations(&omega);
        let a: Vec<f64> = active.iter().map(|&m| row_energy[m]).collect();
        let g2: Vec<f64> = active.iter().map(|&m| g[m].norm_sqr()).collect();
        if g2.iter().all(|&v| v == 0.0) {
            let v = Complex64::new((energy / active.len() as f64).sqrt(), 0.0);
            active.iter().for_each(|&m| x[m] = v);
        } else {
            let mu = secular_root(&a, &g2, energy);
            for (i, &m) in active.iter().enumerate() {
                x[m] = g[m] / (a[i] + mu);
            }
        }

        let scaled = CMatrix::from_fn(n, l, |m, j| x[m] * m_true[(m, j)]);
        omega = &pinv * scaled;

        let r = residual(&x, &omega);
        let done = match history.last() {
            Some(&prev) => prev <= 0.0 || (prev - r).abs() <= cfg.convergence_tol * prev,
            None => r == 0.0,
        };
        history.push(r);
        if done {
            break;
        }
    }
    Ok(AlternatingResult { pilot: x, mixer: omega, residual_history: history, zero_rows })
}

/// Outcome of the exact-solvability analysis of `M_spoof Omega = diag(x) M_true`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpossibilityCertificate {
    /// An exact nontrivial solution is guaranteed by counting alone: `L = 1` or
    /// `N (L - 1) < L^2`, i.e. fewer equations than unknowns.
    pub generically_exact: bool,
    /// Some nonzero `Omega` is matched exactly by a pilot.
    pub exact_solution_found: bool,
    /// `min ||diag(x) M_true - M_spoof Omega||^2 / ||M_spoof Omega||^2` over all `x` and
    /// nonzero `Omega`, a scale-free number in `[0, 1]`.
    pub null_residual: f64,
    /// Residual reached by the alternating solver at the default energy budget.
    pub alternating_residual: f64,
    /// Pilot attaining the minimum when an exact solution exists.
    pub exact_pilot: Option<Vec<Complex64>>,
}

/// Below this relative residual the system is considered exactly solvable.
const NULL_TOL: f64 = 1e-10;

/// Minimizes the relative mismatch in closed form. For fixed `Omega`, row `m` of the target
/// `u_m = (M_spoof Omega)_m` is best matched by `x_m` times row `m` of `M_true`, leaving
/// `P_m u_m` with `P_m` the projector orthogonal to that row. With `omega = vec(Omega)` the
/// problem is the generalized eigenproblem `Q omega = lambda R omega`, where
/// `Q = sum_m S_m^H P_m S_m`, `R = sum_m S_m^H S_m` and `u_m = S_m omega`.
pub fn blind_impossibility_certificate(m_true: &CMatrix, m_spoof: &CMatrix) -> Result<ImpossibilityCertificate> {
    let (n, l) = (m_true.nrows(), m_true.ncols());
    if m_spoof.shape() != (n, l) {
        return Err(Error::DimensionMismatch { expected: [n, l, 1], found: [m_spoof.nrows(), m_spoof.ncols(), 1] });
    }
    let ll = l * l;
    let mut q = CMatrix::zeros(ll, ll);
    let mut r = CMatrix::zeros(ll, ll);
    for m in 0..n {
        // S_m[j, j*l + i] = M_spoof[m, i]
        let s_m = CMatrix::from_fn(l, ll, |j, c| if c / l == j { m_spoof[(m, c % l)] } else { Complex64::new(0.0, 0.0) });
        let v = CMatrix::from_fn(l, 1, |j, _| m_true[(m, j)]);
        let vv = v.norm_squared();
        let mut proj = CMatrix::identity(l, l);
        if vv > 0.0 {
            proj -= &v * v.adjoint() / Complex64::new(vv, 0.0);
        }
        let sh = s_m.adjoint();
        q += &sh * proj * &s_m;
        r += &sh * &s_m;
    }
    let chol = r.cholesky().ok_or(Error::RankDeficient("spoofed angle matrix"))?;
    let lo = chol.l();
    let lo_inv = lo.clone().try_inverse().ok_or(Error::RankDeficient("spoofed angle matrix"))?;
    let c = &lo_inv * q * lo_inv.adjoint();
    let c = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(c);
    let imin = (0..ll).fold(0, |b, i| if eig.eigenvalues[i] < eig.eigenvalues[b] { i } else { b });
    let null_residual = eig.eigenvalues[imin].clamp(0.0, 1.0);
    let exact_solution_found = null_residual < NULL_TOL;
    let exact_pilot = exact_solution_found.then(|| {
        let omega = lo_inv.adjoint() * eig.eigenvectors.column(imin);
        (0..n)
            .map(|m| {
                let vv: f64 = (0..l).map(|j| m_true[(m, j)].norm_sqr()).sum();
                if vv == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let proj: Complex64 = (0..l)
                    .map(|j| {
                        let u: Complex64 = (0..l).map(|i| m_spoof[(m, i)] * omega[j * l + i]).sum();
                        m_true[(m, j)].conj() * u
                    })
                    .sum();
                proj / vv
            })
            .collect()
    });
    let alt = blind_multipath_angle_pilot(m_true, m_spoof, &AlternatingConfig::default())?;
    Ok(ImpossibilityCertificate {
        generically_exact: l == 1 || n * (l - 1) < l * l,
        exact_solution_found,
        null_residual,
        alternating_residual: alt.final_residual(),
        exact_pilot,
    })
}

/// Delayed pilot replicas `x = sum_i amp_i d(offset_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FakePathPlan {
    pub delay_offsets_s: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
}

impl FakePathPlan {
    /// Equal-power plan with amplitudes `1 / sqrt(L_s)`.
    pub fn equal_power(delay_offsets_s: Vec<f64>) -> Result<Self> {
        let a = Complex64::new(1.0 / (delay_offsets_s.len().max(1) as f64).sqrt(), 0.0);
        let plan = Self { amplitudes: vec![a; delay_offsets_s.len()], delay_offsets_s };
        plan.validate()?;
        Ok(plan)
    }

    /// Plan that makes the earliest observed arrivals reproduce the target delays.
    ///
    /// Each target path `i` gets an offset `target_i - tau_0` relative to the true LOS delay.
    /// Copies of later true paths arrive after every copy of the LOS path only if the spread
    /// of the offsets is below the true first TDoA, which is checked here.
    pub fn tdoa(true_delays: &[f64], target_delays: &[f64]) -> Result<Self> {
        if true_delays.is_empty() || target_delays.is_empty() {
            return Err(Error::InvalidPlan("need at least one true and one target delay".into()));
        }
        let mut sorted = true_delays.to_vec();
        sorted.sort_by(f64::total_cmp);
        let tau0 = sorted[0];
        let offsets: Vec<f64> = target_delays.iter().map(|t| t - tau0).collect();
        if sorted.len() >= 2 {
            let lo = offsets.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = offsets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let tdoa = sorted[1] - tau0;
            if hi - lo >= tdoa {
                return Err(Error::InvalidPlan(format!(
                    "target delay spread {:.4e} s is not below the true TDoA {:.4e} s",
                    hi - lo,
                    tdoa
                )));
            }
        }
        Self::equal_power(offsets)
    }

    pub fn validate(&self) -> Result<()> {
        if self.delay_offsets_s.is_empty() {
            return Err(Error::InvalidPlan("plan needs at least one offset".into()));
        }
        if self.delay_offsets_s.len() != self.amplitudes.len() {
            return Err(Error::InvalidPlan("one amplitude per offset".into()));
        }
        if self.delay_offsets_s.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidPlan("offsets must be finite".into()));
        }
        for (i, a) in self.delay_offsets_s.iter().enumerate() {
            if self.delay_offsets_s[..i].contains(a) {
                return Err(Error::InvalidPlan(format!("duplicate offset {a:e} s")));
            }
        }
        Ok(())
    }
}

/// Frequency-domain pilot injecting one delayed replica of every path per plan entry.
pub fn fake_path_pilot(plan: &FakePathPlan, k_count: usize, spacing_hz: f64) -> Result<Vec<Complex64>> {
    plan.validate()?;
    let mut x = vec![Complex64::new(0.0, 0.0); k_count];
    for (&dt, &amp) in plan.delay_offsets_s.iter().zip(&plan.amplitudes) {
        for (xk, d) in x.iter_mut().zip(delay_steering(k_count, spacing_hz, dt)) {
            *xk += amp * d;
        }
    }
    Ok(x)
}

/// Separable pilot `X[m,s,k] = x_b[m] x_c[s] x_d[k]`, i.e. `vec(X) = x_b (x) x_c (x) x_d` in
/// the crate's `(m, s, k)` layout. Not energy-normalized.
pub fn blind_kronecker_pilot(
    x_b: &[Complex64],
    x_c: &[Complex64],
    x_d: &[Complex64],
    cfg: &SystemConfig,
) -> Result<PilotTensor> {
    let dims = [x_b.len(), x_c.len(), x_d.len()];
    if dims != cfg.dims() {
        return Err(Error::DimensionMismatch { expected: cfg.dims(), found: dims });
    }
    let t = Tensor3::from_fn(dims, |m, s, k| x_b[m] * x_c[s] * x_d[k]);
    Ok(PilotTensor { entries: t, energy_budget: cfg.pilot_len() as f64 })
}

/// Composition policy for full blind designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlindMode {
    /// Separate AoA and AoD pilots plus fake-path delay injection.
    Full,
    /// Separate AoA and AoD pilots, delays left alone (`x_d = 1`).
    AngleOnly,
    /// One joint `M x S` angle pilot (on `B (*) C`) followed by fake-path delay injection.
    JointAngleThenDelay,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlindDesign {
    pub pilot: PilotTensor,
    pub aoa: Option<AlternatingResult>,
    pub aod: Option<AlternatingResult>,
    pub joint: Option<AlternatingResult>,
    /// Fake-path plan; each true path then appears once per offset.
    pub plan: Option<FakePathPlan>,
}

/// Gain-free pilot for a whole target parameter set, energy-normalized to `M S K`.
pub fn design_blind_full(
    true_params: &PathParameterSet,
    target: &PathParameterSet,
    books: &Codebooks,
    cfg: &SystemConfig,
    alt: &AlternatingConfig,
    mode: BlindMode,
) -> Result<BlindDesign> {
    let ft = factor_matrices(true_params, books, cfg);
    let fs = factor_matrices(target, books, cfg);
    let plan = match mode {
        BlindMode::AngleOnly => None,
        _ => Some(FakePathPlan::tdoa(&true_params.delays(), &target.delays())?),
    };
    let x_d = match &plan {
        Some(p) => fake_path_pilot(p, cfg.n_subcarriers, cfg.subcarrier_spacing_hz)?,
        None => vec![Complex64::new(1.0, 0.0); cfg.n_subcarriers],
    };

    let mut design = BlindDesign {
        pilot: PilotTensor::nominal(cfg),
        aoa: None,
        aod: None,
        joint: None,
        plan,
    };
    match mode {
        BlindMode::Full | BlindMode::AngleOnly => {
            let xb = blind_multipath_angle_pilot(&ft.b, &fs.b, alt)?;
            let xc = blind_multipath_angle_pilot(&ft.c, &fs.c, alt)?;
            design.pilot = blind_kronecker_pilot(&xb.pilot, &xc.pilot, &x_d, cfg)?;
            design.aoa = Some(xb);
            design.aod = Some(xc);
        }
        BlindMode::JointAngleThenDelay => {
            let z = khatri_rao(&ft.b, &ft.c);
            let zs = khatri_rao(&fs.b, &fs.c);
            let joint = blind_multipath_angle_pilot(&z, &zs, alt)?;
            let s = cfg.n_precoders;
            design.pilot.entries =
                Tensor3::from_fn(cfg.dims(), |m, si, k| joint.pilot[m * s + si] * x_d[k]);
            design.joint = Some(joint);
        }
    }
    design.pilot.normalize_to_budget();
    Ok(design)
}
