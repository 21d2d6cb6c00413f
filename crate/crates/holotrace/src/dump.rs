//! Binary tensor dump.
//!
//! Layout, all little-endian: three `u64` dimensions `(M, S, K)`, then `M S K` pairs of
//! `f64` (real, imaginary) in `(m, s, k)` order with `k` fastest.

use std::io::{self, Read, Write};

use holotrace_core::{Complex64, Tensor3};

pub fn write_tensor<W: Write>(mut w: W, t: &Tensor3) -> io::Result<()> {
    for d in t.dims() {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for v in t.as_slice() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

pub fn read_tensor<R: Read>(mut r: R) -> io::Result<Tensor3> {
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = usize::try_from(read_u64(&mut r)?).map_err(|_| invalid("dimension does not fit in usize"))?;
    }
    let len = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).ok_or_else(|| invalid("tensor too large"))?;
    let mut data = Vec::with_capacity(len.min(1 << 24));
    for _ in 0..len {
        let re = read_f64(&mut r)?;
        data.push(Complex64::new(re, read_f64(&mut r)?));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(invalid("trailing bytes after tensor data"));
    }
    Tensor3::from_vec(dims, data).map_err(|e| invalid(&e.to_string()))
}

fn invalid(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}
