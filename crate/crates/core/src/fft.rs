//! Three-dimensional complex FFT with reusable plans.
//!
//! The reference provider is an iterative radix-2 transform. Each axis pass
//! treats the lattice as `outer × n × inner` and runs the butterflies on whole
//! rows of `inner` contiguous elements, so the `y` and `z` passes stream
//! through memory without gathering strided lines. Every element sees the
//! same arithmetic no matter how the work is split across threads.
//!
//! Conventions: forward is unnormalized, `S(u) = Σ x(l) exp(-2πi u·l / P)`;
//! inverse carries the `1/(Px·Py·Pz)` factor.

use std::fmt::Debug;

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign};

use crate::backend::Backend;
use crate::error::{mismatch, Error, Result};

/// Floating-point precision of a transform or demag pipeline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Precision {
    F32,
    #[default]
    F64,
}

impl std::str::FromStr for Precision {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "f32" => Ok(Precision::F32),
            "f64" => Ok(Precision::F64),
            other => Err(Error::InvalidArgument(format!(
                "precision must be f32 or f64, got {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        })
    }
}

/// Scalar type usable by the transforms.
pub trait Real: Float + FloatConst + NumAssign + Send + Sync + Debug + Default + 'static {
    const PRECISION: Precision;
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Real for f32 {
    const PRECISION: Precision = Precision::F32;
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    const PRECISION: Precision = Precision::F64;
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
}

fn check_size(n: usize) -> Result<()> {
    if n >= 2 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::UnsupportedSize { size: n })
    }
}

/// Radix-2 transform of length `n` applied to rows of a block.
#[derive(Debug, Clone)]
pub struct LinePlan<T> {
    n: usize,
    /// `exp(-2πik/n)` for `k < n/2`, computed in f64.
    twiddles: Vec<Complex<T>>,
    bitrev: Vec<usize>,
}

impl<T: Real> LinePlan<T> {
    pub fn new(n: usize) -> Result<Self> {
        check_size(n)?;
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        let twiddles = (0..n / 2)
            .map(|k| {
                let phase = -2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Complex::new(T::from_f64(phase.cos()), T::from_f64(phase.sin()))
            })
            .collect();
        Ok(Self {
            n,
            twiddles,
            bitrev,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place unnormalized transform of a single contiguous line.
    pub fn transform(&self, line: &mut [Complex<T>], inverse: bool) -> Result<()> {
        if line.len() != self.n {
            return Err(mismatch(self.n, line.len()));
        }
        self.transform_rows(line, 1, inverse, &Backend::serial());
        Ok(())
    }

    /// Transforms along the row axis of `block`, laid out as `n` rows of
    /// `inner` contiguous elements.
    pub(crate) fn transform_rows(
        &self,
        block: &mut [Complex<T>],
        inner: usize,
        inverse: bool,
        backend: &Backend,
    ) {
        let n = self.n;
        debug_assert_eq!(block.len(), n * inner);
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                let (a, b) = block.split_at_mut(j * inner);
                a[i * inner..(i + 1) * inner].swap_with_slice(&mut b[..inner]);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            let twiddle = |k: usize| {
                let w = self.twiddles[k * stride];
                if inverse {
                    w.conj()
                } else {
                    w
                }
            };
            let butterfly = |k: usize, a: &mut [Complex<T>], b: &mut [Complex<T>]| {
                if k == 0 {
                    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                        let t = *y;
                        *y = *x - t;
                        *x += t;
                    }
                } else {
                    let w = twiddle(k);
                    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                        let t = *y * w;
                        *y = *x - t;
                        *x += t;
                    }
                }
            };
            let blocks = n / len;
            if blocks > 1 || inner == 1 {
                backend.for_each_chunk(block, len * inner, |_, chunk| {
                    let (lo, hi) = chunk.split_at_mut(half * inner);
                    for k in 0..half {
                        butterfly(
                            k,
                            &mut lo[k * inner..(k + 1) * inner],
                            &mut hi[k * inner..(k + 1) * inner],
                        );
                    }
                });
            } else {
                let (lo, hi) = block.split_at_mut(half * inner);
                backend.for_each_chunk_pair(lo, hi, inner, |k, a, b| butterfly(k, a, b));
            }
            len *= 2;
        }
    }
}

/// Complex spectrum over padded dims `(Px, Py, Pz)`, x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub dims: [usize; 3],
    pub data: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn zeros(dims: [usize; 3]) -> Self {
        Self {
            dims,
            data: vec![Complex::new(T::zero(), T::zero()); dims[0] * dims[1] * dims[2]],
        }
    }

    #[inline]
    pub fn index(&self, u: usize, v: usize, w: usize) -> usize {
        u + self.dims[0] * (v + self.dims[1] * w)
    }

    pub fn get(&self, u: usize, v: usize, w: usize) -> Complex<T> {
        self.data[self.index(u, v, w)]
    }
}

/// A 3D transform implementation the demag pipeline can be built on.
pub trait FftProvider<T: Real>: Send + Sync {
    fn dims(&self) -> [usize; 3];
    /// Unnormalized forward transform in place.
    fn forward(&self, data: &mut [Complex<T>]) -> Result<()>;
    /// Inverse transform in place, normalized by `1/(Px·Py·Pz)`.
    fn inverse(&self, data: &mut [Complex<T>]) -> Result<()>;

    /// Forward transform of data that is zero outside the leading
    /// `support` block. Providers may skip the known-zero lines.
    fn forward_support(&self, data: &mut [Complex<T>], support: [usize; 3]) -> Result<()> {
        let _ = support;
        self.forward(data)
    }

    /// Inverse transform that only needs to be correct on the leading
    /// `keep` block; other entries are unspecified.
    fn inverse_region(&self, data: &mut [Complex<T>], keep: [usize; 3]) -> Result<()> {
        let _ = keep;
        self.inverse(data)
    }
}

/// Reusable plan for transforms of one padded size.
#[derive(Debug, Clone)]
pub struct FftPlan<T> {
    dims: [usize; 3],
    lines: [LinePlan<T>; 3],
    backend: Backend,
}

/// Width in elements of the column tiles used by the z pass.
const Z_TILE: usize = 32;

/// Plan for `dims` in precision `T` on the serial backend.
pub fn plan_for<T: Real>(dims: [usize; 3]) -> Result<FftPlan<T>> {
    FftPlan::new(dims, Backend::serial())
}

impl<T: Real> FftPlan<T> {
    pub fn new(dims: [usize; 3], backend: Backend) -> Result<Self> {
        for &d in &dims {
            check_size(d)?;
        }
        Ok(Self {
            dims,
            lines: [
                LinePlan::new(dims[0])?,
                LinePlan::new(dims[1])?,
                LinePlan::new(dims[2])?,
            ],
            backend,
        })
    }

    pub fn precision(&self) -> Precision {
        T::PRECISION
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    fn check(&self, len: usize) -> Result<()> {
        if len == self.len() {
            Ok(())
        } else {
            Err(mismatch(self.dims, len))
        }
    }

    fn check_region(&self, region: [usize; 3]) -> Result<()> {
        if region
            .iter()
            .zip(&self.dims)
            .all(|(&r, &d)| r >= 1 && r <= d)
        {
            Ok(())
        } else {
            Err(mismatch(self.dims, region))
        }
    }

    /// x and y passes, plane by plane so each plane stays in cache.
    ///
    /// Forward: x over lines `j < lines`, then y. Inverse: y, then x over
    /// lines `j < lines`, then scaling of the leading `keep_x` entries of
    /// those lines by `scale`. Only planes `k < planes` are touched.
    fn pass_xy(
        &self,
        data: &mut [Complex<T>],
        inverse: bool,
        lines: usize,
        planes: usize,
        scale: Option<(T, usize)>,
    ) {
        let [px, py, _] = self.dims;
        let serial = Backend::serial();
        let plane = px * py;
        let x_lines = |chunk: &mut [Complex<T>]| {
            for line in chunk[..lines * px].chunks_mut(px) {
                self.lines[0].transform_rows(line, 1, inverse, &serial);
            }
        };
        self.backend
            .for_each_chunk(&mut data[..planes * plane], plane, |_, chunk| {
                if inverse {
                    self.lines[1].transform_rows(chunk, px, true, &serial);
                    x_lines(chunk);
                    if let Some((s, keep_x)) = scale {
                        for line in chunk[..lines * px].chunks_mut(px) {
                            for v in &mut line[..keep_x] {
                                *v *= s;
                            }
                        }
                    }
                } else {
                    x_lines(chunk);
                    self.lines[1].transform_rows(chunk, px, false, &serial);
                }
            });
    }

    /// z pass. Rows are whole planes, too long to stay in cache across the
    /// butterfly stages, so narrow column tiles are copied into a small
    /// buffer, transformed and written back.
    fn pass_z(&self, data: &mut [Complex<T>], inverse: bool) {
        let [px, py, pz] = self.dims;
        let serial = Backend::serial();
        let plane = px * py;
        let width = Z_TILE.min(plane);
        let base = SharedMut(data.as_mut_ptr());
        self.backend.for_each_task(plane / width, |t| {
            let mut tile = vec![Complex::new(T::zero(), T::zero()); pz * width];
            let col = t * width;
            for (r, row) in tile.chunks_mut(width).enumerate() {
                // SAFETY: tile `t` owns columns `col..col + width` of every
                // plane; tiles are disjoint and `data` outlives the call.
                let src = unsafe { std::slice::from_raw_parts(base.at(r * plane + col), width) };
                row.copy_from_slice(src);
            }
            self.lines[2].transform_rows(&mut tile, width, inverse, &serial);
            for (r, row) in tile.chunks(width).enumerate() {
                // SAFETY: as above.
                let dst =
                    unsafe { std::slice::from_raw_parts_mut(base.at(r * plane + col), width) };
                dst.copy_from_slice(row);
            }
        });
    }

    fn transform(&self, data: &mut [Complex<T>], inverse: bool) {
        let [_, py, pz] = self.dims;
        if inverse {
            self.pass_z(data, true);
            self.pass_xy(data, true, py, pz, None);
        } else {
            self.pass_xy(data, false, py, pz, None);
            self.pass_z(data, false);
        }
    }

    /// Unnormalized forward transform of a real lattice.
    pub fn forward3d(&self, input: &[T]) -> Result<Spectrum<T>> {
        self.check(input.len())?;
        let mut s = Spectrum {
            dims: self.dims,
            data: input.iter().map(|&v| Complex::new(v, T::zero())).collect(),
        };
        self.transform(&mut s.data, false);
        Ok(s)
    }

    /// Normalized inverse transform; returns the real part.
    pub fn inverse3d(&self, spectrum: &Spectrum<T>) -> Result<Vec<T>> {
        if spectrum.dims != self.dims {
            return Err(mismatch(self.dims, spectrum.dims));
        }
        let mut data = spectrum.data.clone();
        FftProvider::inverse(self, &mut data)?;
        Ok(data.into_iter().map(|c| c.re).collect())
    }
}

impl<T: Real> FftProvider<T> for FftPlan<T> {
    fn dims(&self) -> [usize; 3] {
        self.dims
    }

    fn forward(&self, data: &mut [Complex<T>]) -> Result<()> {
        self.check(data.len())?;
        self.transform(data, false);
        Ok(())
    }

    fn inverse(&self, data: &mut [Complex<T>]) -> Result<()> {
        self.inverse_region(data, self.dims)
    }

    fn forward_support(&self, data: &mut [Complex<T>], support: [usize; 3]) -> Result<()> {
        self.check(data.len())?;
        self.check_region(support)?;
        // Lines lying entirely in the zero padding transform to zero.
        self.pass_xy(data, false, support[1], support[2], None);
        self.pass_z(data, false);
        Ok(())
    }

    fn inverse_region(&self, data: &mut [Complex<T>], keep: [usize; 3]) -> Result<()> {
        self.check(data.len())?;
        self.check_region(keep)?;
        let scale = T::one() / T::from_f64(self.len() as f64);
        self.pass_z(data, true);
        self.pass_xy(data, true, keep[1], keep[2], Some((scale, keep[0])));
        Ok(())
    }
}

/// Base pointer shared by tasks that write disjoint parts of one buffer.
#[derive(Clone, Copy)]
struct SharedMut<T>(*mut T);

// SAFETY: only used for disjoint per-task regions, see `pass_z`.
unsafe impl<T: Send> Send for SharedMut<T> {}
unsafe impl<T: Send> Sync for SharedMut<T> {}

impl<T> SharedMut<T> {
    fn at(&self, offset: usize) -> *mut T {
        // SAFETY: callers stay within the buffer the pointer came from.
        unsafe { self.0.add(offset) }
    }
}
