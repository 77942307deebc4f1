use std::sync::Arc;

use num_complex::Complex;

use crate::backend::{Backend, Phase, PhaseTimer};
use crate::error::{mismatch, Result};
use crate::fft::{FftPlan, FftProvider, Precision, Real, Spectrum};
use crate::grid::Grid;
use crate::vector_field::VectorField;

use super::newell::{XX, XY, XZ, YY, YZ, ZZ};
use super::tensor::{padded_dims, DemagTensorReal};

/// Transformed tensor, computed once per grid and reused every step.
#[derive(Debug, Clone)]
pub struct DemagSpectrum<T> {
    pub dims: [usize; 3],
    /// `[K̃xx, K̃yy, K̃zz, K̃xy, K̃xz, K̃yz]`.
    pub components: [Spectrum<T>; 6],
}

/// Forward-transforms the six tensor lattices.
pub fn precompute_spectrum<T: Real>(
    k: &DemagTensorReal,
    plan: &dyn FftProvider<T>,
) -> Result<DemagSpectrum<T>> {
    if plan.dims() != k.dims {
        return Err(mismatch(k.dims, plan.dims()));
    }
    let mut comps = Vec::with_capacity(6);
    for c in &k.components {
        let mut data: Vec<Complex<T>> = c
            .iter()
            .map(|&v| Complex::new(T::from_f64(v), T::zero()))
            .collect();
        plan.forward(&mut data)?;
        comps.push(Spectrum { dims: k.dims, data });
    }
    let components: [Spectrum<T>; 6] = comps.try_into().expect("six components");
    Ok(DemagSpectrum {
        dims: k.dims,
        components,
    })
}

/// Copies each component of `m` into the low corner of a zeroed padded lattice.
pub fn pad_magnetization<T: Real>(m: &VectorField, dims: [usize; 3]) -> Result<[Vec<T>; 3]> {
    let mut out: [Vec<Complex<T>>; 3] =
        std::array::from_fn(|_| vec![Complex::new(T::zero(), T::zero()); dims.iter().product()]);
    pad_into(m, dims, &mut out, &Backend::serial())?;
    Ok(out.map(|c| c.into_iter().map(|v| v.re).collect()))
}

fn pad_into<T: Real>(
    m: &VectorField,
    dims: [usize; 3],
    bufs: &mut [Vec<Complex<T>>; 3],
    backend: &Backend,
) -> Result<()> {
    let g = m.grid();
    let [nx, ny, nz] = g.dims();
    if nx > dims[0] || ny > dims[1] || nz > dims[2] {
        return Err(mismatch(dims, g.dims()));
    }
    let plane = dims[0] * dims[1];
    for (c, buf) in bufs.iter_mut().enumerate() {
        let src = m.component(c);
        backend.for_each_chunk(buf, plane, |k, slab| {
            let zero = Complex::new(T::zero(), T::zero());
            slab.fill(zero);
            if k >= nz {
                return;
            }
            for j in 0..ny {
                let row = &src[nx * (j + ny * k)..][..nx];
                for (dst, &v) in slab[j * dims[0]..][..nx].iter_mut().zip(row) {
                    *dst = Complex::new(T::from_f64(v), T::zero());
                }
            }
        });
    }
    Ok(())
}

/// Per-bin product of the symmetric tensor spectrum with `(M̃x, M̃y, M̃z)`,
/// overwriting the inputs with `(H̃x, H̃y, H̃z)`.
pub fn spectral_multiply_in_place<T: Real>(
    spectrum: &DemagSpectrum<T>,
    mx: &mut [Complex<T>],
    my: &mut [Complex<T>],
    mz: &mut [Complex<T>],
    backend: &Backend,
) -> Result<()> {
    let len: usize = spectrum.dims.iter().product();
    for l in [mx.len(), my.len(), mz.len()] {
        if l != len {
            return Err(mismatch(len, l));
        }
    }
    let k = &spectrum.components;
    let chunk = spectrum.dims[0] * spectrum.dims[1];
    backend.for_each_chunk3(mx, my, mz, chunk, |ci, cx, cy, cz| {
        let base = ci * chunk;
        for b in 0..cx.len() {
            let g = base + b;
            let (x, y, z) = (cx[b], cy[b], cz[b]);
            let (kxx, kyy, kzz) = (k[XX].data[g], k[YY].data[g], k[ZZ].data[g]);
            let (kxy, kxz, kyz) = (k[XY].data[g], k[XZ].data[g], k[YZ].data[g]);
            cx[b] = kxx * x + kxy * y + kxz * z;
            cy[b] = kxy * x + kyy * y + kyz * z;
            cz[b] = kxz * x + kyz * y + kzz * z;
        }
    });
    Ok(())
}

/// The tensor spectrum reduced to what the multiply needs.
///
/// The padded tensor is real and, per axis, even (diagonal components) or
/// odd (off-diagonal components along their two axes), so each transformed
/// component is real with the same parity in frequency. Only the real part
/// on bins `u <= Px/2, v <= Py/2, w <= Pz/2` is kept; the rest follows by
/// reflection with a sign.
#[derive(Debug, Clone)]
pub struct FoldedSpectrum<T> {
    pub dims: [usize; 3],
    half: [usize; 3],
    components: [Vec<T>; 6],
}

/// Folded index of bin `u` on an axis of length `p`, and whether it was reflected.
fn fold(u: usize, p: usize) -> (usize, bool) {
    if 2 * u <= p {
        (u, false)
    } else {
        (p - u, true)
    }
}

fn fold_axis(p: usize) -> Vec<(usize, bool)> {
    (0..p).map(|u| fold(u, p)).collect()
}

impl<T: Real> FoldedSpectrum<T> {
    pub fn from_spectrum(spectrum: &DemagSpectrum<T>) -> Self {
        let dims = spectrum.dims;
        let half = dims.map(|p| p / 2 + 1);
        let components = std::array::from_fn(|c| {
            let full = &spectrum.components[c];
            let mut out = Vec::with_capacity(half[0] * half[1] * half[2]);
            for w in 0..half[2] {
                for v in 0..half[1] {
                    for u in 0..half[0] {
                        out.push(full.get(u, v, w).re);
                    }
                }
            }
            out
        });
        Self {
            dims,
            half,
            components,
        }
    }

    /// Tensor at bin `(u, v, w)` as `[xx, yy, zz, xy, xz, yz]`.
    pub fn at(&self, u: usize, v: usize, w: usize) -> [T; 6] {
        let (fu, su) = fold(u, self.dims[0]);
        let (fv, sv) = fold(v, self.dims[1]);
        let (fw, sw) = fold(w, self.dims[2]);
        let g = fu + self.half[0] * (fv + self.half[1] * fw);
        let k = |c: usize, flip: bool| {
            if flip {
                -self.components[c][g]
            } else {
                self.components[c][g]
            }
        };
        [
            k(XX, false),
            k(YY, false),
            k(ZZ, false),
            k(XY, su ^ sv),
            k(XZ, su ^ sw),
            k(YZ, sv ^ sw),
        ]
    }

    /// Same contract as [`spectral_multiply_in_place`].
    pub fn multiply_in_place(
        &self,
        mx: &mut [Complex<T>],
        my: &mut [Complex<T>],
        mz: &mut [Complex<T>],
        backend: &Backend,
    ) -> Result<()> {
        let len: usize = self.dims.iter().product();
        for l in [mx.len(), my.len(), mz.len()] {
            if l != len {
                return Err(mismatch(len, l));
            }
        }
        let [px, py, pz] = self.dims;
        let (ax, ay, az) = (fold_axis(px), fold_axis(py), fold_axis(pz));
        let k = &self.components;
        let [hx, hy, _] = self.half;
        backend.for_each_chunk3(mx, my, mz, px * py, |w, cx, cy, cz| {
            let (fw, sw) = az[w];
            for v in 0..py {
                let (fv, sv) = ay[v];
                let row = hx * (fv + hy * fw);
                for u in 0..px {
                    let (fu, su) = ax[u];
                    let g = row + fu;
                    let b = u + px * v;
                    let sign = |flip: bool, t: T| if flip { -t } else { t };
                    let (kxx, kyy, kzz) = (k[XX][g], k[YY][g], k[ZZ][g]);
                    let kxy = sign(su ^ sv, k[XY][g]);
                    let kxz = sign(su ^ sw, k[XZ][g]);
                    let kyz = sign(sv ^ sw, k[YZ][g]);
                    let (x, y, z) = (cx[b], cy[b], cz[b]);
                    cx[b] = x * kxx + y * kxy + z * kxz;
                    cy[b] = x * kxy + y * kyy + z * kyz;
                    cz[b] = x * kxz + y * kyz + z * kzz;
                }
            }
        });
        Ok(())
    }
}

/// Allocating variant of [`spectral_multiply_in_place`].
pub fn spectral_multiply<T: Real>(
    mx: &Spectrum<T>,
    my: &Spectrum<T>,
    mz: &Spectrum<T>,
    spectrum: &DemagSpectrum<T>,
) -> Result<[Spectrum<T>; 3]> {
    for s in [mx, my, mz] {
        if s.dims != spectrum.dims {
            return Err(mismatch(spectrum.dims, s.dims));
        }
    }
    let (mut x, mut y, mut z) = (mx.clone(), my.clone(), mz.clone());
    spectral_multiply_in_place(
        spectrum,
        &mut x.data,
        &mut y.data,
        &mut z.data,
        &Backend::serial(),
    )?;
    Ok([x, y, z])
}

/// Per-grid demag solver: plan, cached tensor spectrum and padded work buffers.
pub struct DemagPipeline<T: Real> {
    grid: Grid,
    plan: Arc<dyn FftProvider<T>>,
    spectrum: FoldedSpectrum<T>,
    bufs: [Vec<Complex<T>>; 3],
    backend: Backend,
}

impl<T: Real> std::fmt::Debug for DemagPipeline<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DemagPipeline")
            .field("grid", &self.grid)
            .field("dims", &self.spectrum.dims)
            .field("precision", &T::PRECISION)
            .finish()
    }
}

impl<T: Real> DemagPipeline<T> {
    /// Default padding (next power of two `>= 2n` per axis).
    pub fn new(grid: &Grid, backend: &Backend) -> Result<Self> {
        Self::with_padding(grid, padded_dims(grid), backend)
    }

    pub fn with_padding(grid: &Grid, dims: [usize; 3], backend: &Backend) -> Result<Self> {
        let plan = FftPlan::<T>::new(dims, backend.clone())?;
        Self::with_provider(grid, dims, Arc::new(plan), backend)
    }

    /// Builds on an arbitrary transform provider of matching dims.
    pub fn with_provider(
        grid: &Grid,
        dims: [usize; 3],
        provider: Arc<dyn FftProvider<T>>,
        backend: &Backend,
    ) -> Result<Self> {
        let tensor = DemagTensorReal::build_padded(grid, dims, backend)?;
        Self::from_tensor(&tensor, provider, backend)
    }

    pub fn from_tensor(
        tensor: &DemagTensorReal,
        provider: Arc<dyn FftProvider<T>>,
        backend: &Backend,
    ) -> Result<Self> {
        let spectrum =
            FoldedSpectrum::from_spectrum(&precompute_spectrum(tensor, provider.as_ref())?);
        let len = tensor.dims.iter().product();
        Ok(Self {
            grid: tensor.grid,
            plan: provider,
            spectrum,
            bufs: std::array::from_fn(|_| vec![Complex::new(T::zero(), T::zero()); len]),
            backend: backend.clone(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> [usize; 3] {
        self.spectrum.dims
    }

    pub fn spectrum(&self) -> &FoldedSpectrum<T> {
        &self.spectrum
    }

    /// Pad, three forward transforms, spectral multiply, three inverse
    /// transforms, then truncation to the sample region.
    pub fn compute(
        &mut self,
        m: &VectorField,
        out: &mut VectorField,
        mut timer: Option<&mut PhaseTimer<'_>>,
    ) -> Result<()> {
        m.check_grid(&self.grid)?;
        out.check_grid(&self.grid)?;
        let dims = self.spectrum.dims;
        let Self {
            plan,
            spectrum,
            bufs,
            backend,
            ..
        } = self;

        let region = m.grid().dims();
        timed(&mut timer, Phase::Pad, || pad_into(m, dims, bufs, backend))?;
        timed(&mut timer, Phase::ForwardFft, || {
            bufs.iter_mut()
                .try_for_each(|b| plan.forward_support(b, region))
        })?;
        timed(&mut timer, Phase::SpectralMultiply, || {
            let [x, y, z] = bufs;
            spectrum.multiply_in_place(x, y, z, backend)
        })?;
        timed(&mut timer, Phase::InverseFft, || {
            bufs.iter_mut()
                .try_for_each(|b| plan.inverse_region(b, region))
        })?;
        timed(&mut timer, Phase::Pad, || {
            let [nx, ny, _] = m.grid().dims();
            for (c, buf) in bufs.iter().enumerate() {
                let dst = out.component_mut(c);
                backend.map_scalar(dst, |idx| {
                    let i = idx % nx;
                    let j = (idx / nx) % ny;
                    let k = idx / (nx * ny);
                    buf[i + dims[0] * (j + dims[1] * k)].re.to_f64()
                });
            }
        });
        Ok(())
    }
}

fn timed<R>(timer: &mut Option<&mut PhaseTimer<'_>>, phase: Phase, f: impl FnOnce() -> R) -> R {
    match timer {
        Some(t) => t.phase(phase, f),
        None => f(),
    }
}

/// Demag field of `m` using a prebuilt spectrum and plan (allocates buffers).
pub fn demag_field<T: Real>(
    m: &VectorField,
    spectrum: &DemagSpectrum<T>,
    plan: &dyn FftProvider<T>,
) -> Result<VectorField> {
    if plan.dims() != spectrum.dims {
        return Err(mismatch(spectrum.dims, plan.dims()));
    }
    let backend = Backend::serial();
    let len = spectrum.dims.iter().product();
    let mut bufs: [Vec<Complex<T>>; 3] =
        std::array::from_fn(|_| vec![Complex::new(T::zero(), T::zero()); len]);
    pad_into(m, spectrum.dims, &mut bufs, &backend)?;
    for b in bufs.iter_mut() {
        plan.forward(b)?;
    }
    {
        let [x, y, z] = &mut bufs;
        spectral_multiply_in_place(spectrum, x, y, z, &backend)?;
    }
    for b in bufs.iter_mut() {
        plan.inverse(b)?;
    }
    let g = *m.grid();
    let d = spectrum.dims;
    let mut out = VectorField::zeros(g);
    for idx in 0..g.cell_count() {
        let (i, j, k) = g.unindex(idx);
        let p = i + d[0] * (j + d[1] * k);
        out.set(
            idx,
            [
                bufs[0][p].re.to_f64(),
                bufs[1][p].re.to_f64(),
                bufs[2][p].re.to_f64(),
            ],
        );
    }
    Ok(out)
}

/// Demag solver with the transform precision chosen at run time.
#[derive(Debug)]
pub enum Demag {
    F32(DemagPipeline<f32>),
    F64(DemagPipeline<f64>),
}

impl Demag {
    pub fn new(grid: &Grid, precision: Precision, backend: &Backend) -> Result<Self> {
        Ok(match precision {
            Precision::F32 => Demag::F32(DemagPipeline::new(grid, backend)?),
            Precision::F64 => Demag::F64(DemagPipeline::new(grid, backend)?),
        })
    }

    pub fn precision(&self) -> Precision {
        match self {
            Demag::F32(_) => Precision::F32,
            Demag::F64(_) => Precision::F64,
        }
    }

    pub fn compute(
        &mut self,
        m: &VectorField,
        out: &mut VectorField,
        timer: Option<&mut PhaseTimer<'_>>,
    ) -> Result<()> {
        match self {
            Demag::F32(p) => p.compute(m, out, timer),
            Demag::F64(p) => p.compute(m, out, timer),
        }
    }

    /// Allocating convenience wrapper.
    pub fn field(&mut self, m: &VectorField) -> Result<VectorField> {
        let mut out = VectorField::zeros(*m.grid());
        self.compute(m, &mut out, None)?;
        Ok(out)
    }
}
