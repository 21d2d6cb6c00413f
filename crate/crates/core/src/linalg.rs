//! Small dense linear-algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use crate::tensor::Tensor3;

pub type CMatrix = DMatrix<Complex64>;

/// Column-wise Kronecker product. `a` is `M x L`, `b` is `N x L`, the result `MN x L`
/// with row index `m * N + n`.
pub fn khatri_rao(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.ncols(), "khatri_rao operands need the same column count");
    let (m, n) = (a.nrows(), b.nrows());
    CMatrix::from_fn(m * n, a.ncols(), |r, l| a[(r / n, l)] * b[(r % n, l)])
}

/// Kronecker product of two vectors, `out[i * b.len() + j] = a[i] * b[j]`.
pub fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Rank-`L` CP tensor `T[m,s,k] = sum_l w[l] B[m,l] C[s,l] D[k,l]`.
pub fn cp_tensor(b: &CMatrix, c: &CMatrix, d: &CMatrix, w: &[Complex64]) -> Tensor3 {
    let l = w.len();
    assert!(b.ncols() == l && c.ncols() == l && d.ncols() == l, "factor column count must match weights");
    let dims = [b.nrows(), c.nrows(), d.nrows()];
    let mut t = Tensor3::zeros(dims);
    let mut coef = Vec::with_capacity(l);
    for m in 0..dims[0] {
        for s in 0..dims[1] {
            coef.clear();
            coef.extend((0..l).map(|p| w[p] * b[(m, p)] * c[(s, p)]));
            let fiber = t.fiber_mut(m, s);
            for (k, out) in fiber.iter_mut().enumerate() {
                let mut acc = Complex64::zero();
                for (p, cf) in coef.iter().enumerate() {
                    acc += cf * d[(k, p)];
                }
                *out = acc;
            }
        }
    }
    t
}

/// Hermitian inner product `x^H y`.
pub fn dot_h(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn khatri_rao_matches_columnwise_kron() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(0.0, 1.0), c(3.0, 0.0)]);
        let b = CMatrix::from_row_slice(3, 2, &[c(1.0, 1.0), c(0.0, 2.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, -1.0), c(4.0, 0.0)]);
        let kr = khatri_rao(&a, &b);
        for l in 0..2 {
            let ac: Vec<_> = a.column(l).iter().copied().collect();
            let bc: Vec<_> = b.column(l).iter().copied().collect();
            let expected = kron(&ac, &bc);
            for (r, e) in expected.iter().enumerate() {
                assert_eq!(kr[(r, l)], *e);
            }
        }
    }

    #[test]
    fn cp_tensor_matches_elementwise_sum() {
        let b = CMatrix::from_fn(2, 2, |i, j| c(i as f64 + 1.0, j as f64));
        let cc = CMatrix::from_fn(3, 2, |i, j| c(j as f64, i as f64 - 1.0));
        let d = CMatrix::from_fn(4, 2, |i, j| c((i * j) as f64, 1.0));
        let w = [c(0.5, 0.0), c(0.0, -2.0)];
        let t = cp_tensor(&b, &cc, &d, &w);
        for m in 0..2 {
            for s in 0..3 {
                for k in 0..4 {
                    let e: Complex64 = (0..2).map(|l| w[l] * b[(m, l)] * cc[(s, l)] * d[(k, l)]).sum();
                    assert!((t[(m, s, k)] - e).norm() < 1e-12);
                }
            }
        }
    }
}
