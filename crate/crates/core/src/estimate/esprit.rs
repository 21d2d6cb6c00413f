//! One-dimensional shift-invariance estimation for a uniform linear array.

#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EspritEstimate {
    /// Estimated `sin(angle)`, clamped to `[-1, 1]`.
    pub sine: f64,
    /// The rotation `Psi`; unit modulus for a clean steering vector.
    pub rotation: Complex64,
}

impl EspritEstimate {
    pub fn angle(&self) -> f64 {
        self.sine.asin()
    }

    /// Distance of `|Psi|` from the unit circle.
    pub fn modulus_error(&self) -> f64 {
        (self.rotation.norm() - 1.0).abs()
    }
}

/// Total-least-squares ESPRIT on one signal-subspace vector `u` of a half-wavelength ULA.
///
/// Uses maximum-overlap subarrays `u[..n-1]` and `u[1..]`. The TLS rotation comes from the
/// smallest eigenvector `(v1, v2)` of the 2x2 Gram matrix of `[u1 u2]` as `Psi = -v1 / v2`.
/// Returns `None` for fewer than two elements or a vanishing vector.
pub fn esprit_sine(u: &[Complex64]) -> Option<EspritEstimate> {
    let n = u.len();
    if n < 2 {
        return None;
    }
    let (u1, u2) = (&u[..n - 1], &u[1..]);
    let p: f64 = u1.iter().map(|v| v.norm_sqr()).sum();
    let r: f64 = u2.iter().map(|v| v.norm_sqr()).sum();
    let q: Complex64 = u1.iter().zip(u2).map(|(a, b)| a.conj() * b).sum();
    let half = 0.5 * (p - r);
    let lambda_min = 0.5 * (p + r) - (half * half + q.norm_sqr()).sqrt();
    // Eigenvector (q, lambda - p) gives Psi = q / (p - lambda); the second form is used when
    // that denominator is the smaller one numerically.
    let d1 = p - lambda_min;
    let d2 = r - lambda_min;
    let rotation = if d1 >= d2 {
        if d1 <= 0.0 {
            return None;
        }
        q / d1
    } else {
        // Eigenvector (lambda - r, q*) gives Psi = (r - lambda) / q*.
        if q.norm() == 0.0 {
            return None;
        }
        Complex64::new(d2, 0.0) / q.conj()
    };
    if !(rotation.re.is_finite() && rotation.im.is_finite()) {
        return None;
    }
    let sine = (rotation.arg() / core::f64::consts::PI).clamp(-1.0, 1.0);
    Some(EspritEstimate { sine, rotation })
}
