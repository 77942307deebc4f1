//! Execution backends.
//!
//! All data-parallel work in the crate goes through a [`Backend`]: per-cell
//! kernels ([`Backend::map_cells`]), chunked slice kernels used by the FFT
//! passes and the spectral multiply ([`Backend::for_each_chunk`]), and
//! reductions ([`Backend::reduce_cells`]). The serial backend is the
//! reference; the parallel backend runs the same per-element arithmetic on a
//! rayon pool, so kernels without cross-cell reductions match bitwise.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::vec3::Vec3;
use crate::vector_field::VectorField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Serial,
    Parallel,
}

impl std::str::FromStr for BackendKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "serial" => Ok(BackendKind::Serial),
            "parallel" => Ok(BackendKind::Parallel),
            other => Err(Error::InvalidArgument(format!(
                "backend must be serial or parallel, got {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for BackendKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BackendKind::Serial => "serial",
            BackendKind::Parallel => "parallel",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Sum,
    Max,
}

/// Leaf size of the parallel reduction tree. Fixed so the summation order
/// does not depend on the thread count.
const REDUCE_BLOCK: usize = 1024;

/// Minimum number of elements handed to one rayon task in per-cell kernels.
const MIN_TASK: usize = 4096;

#[derive(Clone)]
pub struct Backend {
    kind: BackendKind,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl std::fmt::Debug for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Backend")
            .field("kind", &self.kind)
            .field("threads", &self.threads())
            .finish()
    }
}

impl Default for Backend {
    fn default() -> Self {
        Self::serial()
    }
}

impl Backend {
    pub fn serial() -> Self {
        Self {
            kind: BackendKind::Serial,
            pool: None,
        }
    }

    /// Data-parallel backend with its own pool. `threads = 0` means hardware concurrency.
    pub fn parallel(threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .thread_name(|i| format!("micromag-{i}"))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        Ok(Self {
            kind: BackendKind::Parallel,
            pool: Some(Arc::new(pool)),
        })
    }

    pub fn new(kind: BackendKind, threads: usize) -> Result<Self> {
        match kind {
            BackendKind::Serial => Ok(Self::serial()),
            BackendKind::Parallel => Self::parallel(threads),
        }
    }

    pub fn kind(&self) -> BackendKind {
        self.kind
    }

    pub fn threads(&self) -> usize {
        self.pool.as_ref().map_or(1, |p| p.current_num_threads())
    }

    fn run<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }

    /// Evaluates `kernel(cell)` for every cell and writes the result into `out`.
    ///
    /// The kernel may read any input it captures but must only depend on the
    /// cell index it is given.
    pub fn map_cells<F>(&self, out: &mut VectorField, kernel: F)
    where
        F: Fn(usize) -> Vec3 + Sync,
    {
        let [x, y, z] = out.components_mut();
        match self.kind {
            BackendKind::Serial => {
                for (idx, ((ox, oy), oz)) in
                    x.iter_mut().zip(y.iter_mut()).zip(z.iter_mut()).enumerate()
                {
                    let v = kernel(idx);
                    *ox = v[0];
                    *oy = v[1];
                    *oz = v[2];
                }
            }
            BackendKind::Parallel => self.run(|| {
                x.par_iter_mut()
                    .zip(y.par_iter_mut())
                    .zip(z.par_iter_mut())
                    .with_min_len(MIN_TASK)
                    .enumerate()
                    .for_each(|(idx, ((ox, oy), oz))| {
                        let v = kernel(idx);
                        *ox = v[0];
                        *oy = v[1];
                        *oz = v[2];
                    })
            }),
        }
    }

    /// Scalar per-cell kernel: `out[i] = kernel(i)`.
    pub fn map_scalar<F>(&self, out: &mut [f64], kernel: F)
    where
        F: Fn(usize) -> f64 + Sync,
    {
        match self.kind {
            BackendKind::Serial => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = kernel(i);
                }
            }
            BackendKind::Parallel => self.run(|| {
                out.par_iter_mut()
                    .with_min_len(MIN_TASK)
                    .enumerate()
                    .for_each(|(i, o)| *o = kernel(i))
            }),
        }
    }

    /// Runs `f(task)` for every `task < count`; tasks must be independent.
    pub fn for_each_task<F>(&self, count: usize, f: F)
    where
        F: Fn(usize) + Sync,
    {
        match self.kind {
            BackendKind::Serial => (0..count).for_each(f),
            BackendKind::Parallel => self.run(|| (0..count).into_par_iter().for_each(&f)),
        }
    }

    /// Runs `f(chunk_index, chunk)` over consecutive chunks of `data`.
    pub fn for_each_chunk<T, F>(&self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync,
    {
        let chunk = chunk.max(1);
        match self.kind {
            BackendKind::Serial => data
                .chunks_mut(chunk)
                .enumerate()
                .for_each(|(i, c)| f(i, c)),
            BackendKind::Parallel => self.run(|| {
                data.par_chunks_mut(chunk)
                    .enumerate()
                    .for_each(|(i, c)| f(i, c))
            }),
        }
    }

    /// Runs `f(pair_index, a, b)` over matching chunk pairs of two equally long slices.
    pub fn for_each_chunk_pair<T, F>(&self, a: &mut [T], b: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T], &mut [T]) + Sync,
    {
        let chunk = chunk.max(1);
        match self.kind {
            BackendKind::Serial => a
                .chunks_mut(chunk)
                .zip(b.chunks_mut(chunk))
                .enumerate()
                .for_each(|(i, (x, y))| f(i, x, y)),
            BackendKind::Parallel => self.run(|| {
                a.par_chunks_mut(chunk)
                    .zip(b.par_chunks_mut(chunk))
                    .enumerate()
                    .for_each(|(i, (x, y))| f(i, x, y))
            }),
        }
    }

    /// Runs `f(chunk_index, a, b, c)` over matching chunks of three equally long slices.
    pub fn for_each_chunk3<T, F>(&self, a: &mut [T], b: &mut [T], c: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T], &mut [T], &mut [T]) + Sync,
    {
        let chunk = chunk.max(1);
        match self.kind {
            BackendKind::Serial => a
                .chunks_mut(chunk)
                .zip(b.chunks_mut(chunk))
                .zip(c.chunks_mut(chunk))
                .enumerate()
                .for_each(|(i, ((x, y), z))| f(i, x, y, z)),
            BackendKind::Parallel => self.run(|| {
                a.par_chunks_mut(chunk)
                    .zip(b.par_chunks_mut(chunk))
                    .zip(c.par_chunks_mut(chunk))
                    .enumerate()
                    .for_each(|(i, ((x, y), z))| f(i, x, y, z))
            }),
        }
    }

    /// Sum or max over a scalar per-cell field.
    ///
    /// Serial: left-to-right. Parallel: fixed blocks of 1024 summed left to
    /// right, then a pairwise tree over the block results.
    pub fn reduce_cells(&self, values: &[f64], reduction: Reduction) -> Result<f64> {
        if values.is_empty() {
            return Err(Error::EmptyField);
        }
        let leaf = |s: &[f64]| match reduction {
            Reduction::Sum => s.iter().sum::<f64>(),
            Reduction::Max => s.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        };
        Ok(match self.kind {
            BackendKind::Serial => leaf(values),
            BackendKind::Parallel => {
                let partial: Vec<f64> =
                    self.run(|| values.par_chunks(REDUCE_BLOCK).map(leaf).collect());
                tree_combine(&partial, reduction)
            }
        })
    }
}

fn tree_combine(values: &[f64], reduction: Reduction) -> f64 {
    match values.len() {
        0 => unreachable!("tree_combine on empty input"),
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            let (a, b) = (tree_combine(l, reduction), tree_combine(r, reduction));
            match reduction {
                Reduction::Sum => a + b,
                Reduction::Max => a.max(b),
            }
        }
    }
}

/// Phases of one solver step, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Pad,
    ForwardFft,
    SpectralMultiply,
    InverseFft,
    LocalFields,
    Integrate,
}

/// Wall-clock breakdown of one step, in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepTiming {
    pub pad: f64,
    pub forward_fft: f64,
    pub spectral_multiply: f64,
    pub inverse_fft: f64,
    pub local_fields: f64,
    pub integrate: f64,
    pub total: f64,
}

impl StepTiming {
    pub fn add(&mut self, phase: Phase, d: Duration) {
        let s = d.as_secs_f64();
        match phase {
            Phase::Pad => self.pad += s,
            Phase::ForwardFft => self.forward_fft += s,
            Phase::SpectralMultiply => self.spectral_multiply += s,
            Phase::InverseFft => self.inverse_fft += s,
            Phase::LocalFields => self.local_fields += s,
            Phase::Integrate => self.integrate += s,
        }
    }

    pub fn phase_sum(&self) -> f64 {
        self.pad
            + self.forward_fft
            + self.spectral_multiply
            + self.inverse_fft
            + self.local_fields
            + self.integrate
    }

    /// Demag share of the step (pad + transforms + multiply).
    pub fn demag(&self) -> f64 {
        self.pad + self.forward_fft + self.spectral_multiply + self.inverse_fft
    }
}

/// Monotonic time source.
pub trait Clock {
    fn now(&self) -> Duration;
}

/// Wall clock anchored at construction.
#[derive(Debug, Clone, Copy)]
pub struct WallClock {
    origin: Instant,
}

impl Default for WallClock {
    fn default() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Clock for WallClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }
}

/// Phase recorder handed to a step; each `phase` call times one closure.
pub struct PhaseTimer<'a> {
    clock: &'a dyn Clock,
    timing: StepTiming,
}

impl<'a> PhaseTimer<'a> {
    pub fn new(clock: &'a dyn Clock) -> Self {
        Self {
            clock,
            timing: StepTiming::default(),
        }
    }

    pub fn phase<R>(&mut self, phase: Phase, f: impl FnOnce() -> R) -> R {
        let t0 = self.clock.now();
        let r = f();
        let t1 = self.clock.now();
        self.timing.add(phase, t1.saturating_sub(t0));
        r
    }

    pub fn record(&mut self, phase: Phase, d: Duration) {
        self.timing.add(phase, d);
    }

    pub fn timing(&self) -> &StepTiming {
        &self.timing
    }
}

/// Times one call of `step`, which reports its own phases through the timer.
pub fn time_step<E>(
    clock: &dyn Clock,
    step: impl FnOnce(&mut PhaseTimer<'_>) -> Result<(), E>,
) -> Result<StepTiming, E> {
    let mut timer = PhaseTimer::new(clock);
    let t0 = clock.now();
    step(&mut timer)?;
    let t1 = clock.now();
    let mut timing = timer.timing;
    timing.total = t1.saturating_sub(t0).as_secs_f64();
    Ok(timing)
}

/// Warm-up steps discarded before measuring.
pub const BENCH_WARMUP: usize = 3;
/// Measured steps whose median is reported.
pub const BENCH_SAMPLES: usize = 20;

/// Runs `BENCH_WARMUP` discarded steps then `samples` timed steps and
/// returns the per-field median.
pub fn bench_steps<E>(
    clock: &dyn Clock,
    samples: usize,
    mut step: impl FnMut(&mut PhaseTimer<'_>) -> Result<(), E>,
) -> Result<StepTiming, E> {
    for _ in 0..BENCH_WARMUP {
        time_step(clock, &mut step)?;
    }
    let mut runs = Vec::with_capacity(samples);
    for _ in 0..samples.max(1) {
        runs.push(time_step(clock, &mut step)?);
    }
    Ok(median_timing(&runs))
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn median_timing(runs: &[StepTiming]) -> StepTiming {
    let pick = |f: fn(&StepTiming) -> f64| median(&mut runs.iter().map(f).collect::<Vec<_>>());
    StepTiming {
        pad: pick(|t| t.pad),
        forward_fft: pick(|t| t.forward_fft),
        spectral_multiply: pick(|t| t.spectral_multiply),
        inverse_fft: pick(|t| t.inverse_fft),
        local_fields: pick(|t| t.local_fields),
        integrate: pick(|t| t.integrate),
        total: pick(|t| t.total),
    }
}

/// Field data held on the execution side of the backend boundary.
///
/// Counts every crossing so runs can be checked against the residency
/// contract: one upload at initialization, downloads only when sampled.
#[derive(Debug)]
pub struct Resident<T> {
    data: T,
    uploads: usize,
    downloads: usize,
}

impl<T: Clone> Resident<T> {
    pub fn upload(data: T) -> Self {
        Self {
            data,
            uploads: 1,
            downloads: 0,
        }
    }

    /// Copies the data back to the caller.
    pub fn download(&mut self) -> T {
        self.downloads += 1;
        self.data.clone()
    }

    /// Consumes the resident copy (counts as a download).
    pub fn into_inner(mut self) -> (T, Transfers) {
        self.downloads += 1;
        let t = self.transfers();
        (self.data, t)
    }

    /// Access for kernels running on the backend.
    pub fn device(&mut self) -> &mut T {
        &mut self.data
    }

    pub fn device_ref(&self) -> &T {
        &self.data
    }

    pub fn transfers(&self) -> Transfers {
        Transfers {
            uploads: self.uploads,
            downloads: self.downloads,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Transfers {
    pub uploads: usize,
    pub downloads: usize,
}
