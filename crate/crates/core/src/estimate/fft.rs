//! Unnormalized inverse DFT with optional zero padding, `X[n] = sum_k x[k] e^{+j 2 pi k n / N}`.

#[cfg(feature = "std")]
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

#[cfg(feature = "std")]
pub(crate) struct InverseDft {
    n: usize,
    fft: alloc::sync::Arc<dyn rustfft::Fft<f64>>,
    scratch: Vec<Complex64>,
}

#[cfg(feature = "std")]
impl InverseDft {
    pub(crate) fn new(n: usize) -> Self {
        let fft = rustfft::FftPlanner::new().plan_fft_inverse(n);
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        Self { n, fft, scratch }
    }

    /// Writes the length-`n` inverse transform of `input` (zero-padded) into `out`.
    pub(crate) fn process(&mut self, input: &[Complex64], out: &mut Vec<Complex64>) {
        out.clear();
        out.extend_from_slice(&input[..input.len().min(self.n)]);
        out.resize(self.n, Complex64::new(0.0, 0.0));
        self.fft.process_with_scratch(out, &mut self.scratch);
    }
}

#[cfg(not(feature = "std"))]
pub(crate) struct InverseDft {
    n: usize,
    twiddles: Vec<Complex64>,
}

#[cfg(not(feature = "std"))]
impl InverseDft {
    pub(crate) fn new(n: usize) -> Self {
        let twiddles = (0..n)
            .map(|i| Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * i as f64 / n as f64))
            .collect();
        Self { n, twiddles }
    }

    pub(crate) fn process(&mut self, input: &[Complex64], out: &mut Vec<Complex64>) {
        out.clear();
        out.resize(self.n, Complex64::new(0.0, 0.0));
        let len = input.len().min(self.n);
        for (n, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, x) in input[..len].iter().enumerate() {
                acc += x * self.twiddles[(k * n) % self.n];
            }
            *o = acc;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let x: Vec<Complex64> = (0..10).map(|k| Complex64::new(k as f64, 1.0 - k as f64 * 0.3)).collect();
        let mut dft = InverseDft::new(16);
        let mut out = Vec::new();
        dft.process(&x, &mut out);
        for (n, o) in out.iter().enumerate() {
            let d: Complex64 = x
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI * (k * n) as f64 / 16.0))
                .sum();
            assert!((o - d).norm() < 1e-10);
        }
    }
}
