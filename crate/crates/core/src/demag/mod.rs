//! Demagnetization field by zero-padded FFT convolution.
//!
//! `H = K ∗ M`, with `K` the cell-averaged tensor (self-term trace -1).
//! Each axis of `n` cells is padded to a power of two `P >= 2n`; the
//! magnetization fills slots `[0, n)` and the tensor is stored in
//! wrap-around order (`K(d)` at `d` for `d >= 0`, at `P + d` otherwise), so
//! the cyclic convolution of the padded lattices equals the linear one on
//! the sample. The tensor spectrum is computed once; every field evaluation
//! is three forward transforms, a per-bin 3×3 product and three inverse
//! transforms.

pub mod newell;
mod pipeline;
mod tensor;

pub use pipeline::{
    demag_field, pad_magnetization, precompute_spectrum, spectral_multiply,
    spectral_multiply_in_place, Demag, DemagPipeline, DemagSpectrum, FoldedSpectrum,
};
pub use tensor::{padded_dims, padded_len, wrap_index, DemagTensorReal};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fft::LinePlan;

/// One-dimensional padded convolution `H(i) = Σ_l M(l)·K(i - l)`.
///
/// `kernel[d + n - 1]` holds `K(d)` for `d` in `[-(n-1), n-1]`. The sequence is
/// zero-padded to `P = 2n` rounded up to a power of two, the kernel is
/// stored in wrap-around order, both are transformed, multiplied per bin,
/// inverse transformed and truncated to the first `n` entries.
pub fn convolve_1d_padded(m: &[f64], kernel: &[f64]) -> Result<Vec<f64>> {
    let n = m.len();
    if n == 0 || kernel.len() != 2 * n - 1 {
        return Err(Error::InvalidArgument(format!(
            "kernel length must be 2n-1 = {}, got {}",
            (2 * n).saturating_sub(1),
            kernel.len()
        )));
    }
    let p = padded_len(n);
    let plan = LinePlan::<f64>::new(p)?;
    let zero = Complex::new(0.0, 0.0);
    let mut mp = vec![zero; p];
    for (dst, &v) in mp.iter_mut().zip(m) {
        *dst = Complex::new(v, 0.0);
    }
    let mut kp = vec![zero; p];
    for d in -(n as isize - 1)..n as isize {
        kp[wrap_index(d, n, p)?] = Complex::new(kernel[(d + n as isize - 1) as usize], 0.0);
    }
    plan.transform(&mut mp, false)?;
    plan.transform(&mut kp, false)?;
    for (a, b) in mp.iter_mut().zip(&kp) {
        *a *= b;
    }
    plan.transform(&mut mp, true)?;
    Ok(mp[..n].iter().map(|c| c.re / p as f64).collect())
}
