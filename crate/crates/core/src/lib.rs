//! Finite-difference micromagnetics.
//!
//! The crate integrates the Landau-Lifshitz-Gilbert equation on a regular
//! grid of cuboid cells. The effective field combines exchange, uniaxial
//! anisotropy, Zeeman and a demagnetizing field computed by zero-padded FFT
//! convolution with the Newell tensor. Brute-force references live in
//! [`oracle`], execution strategy in [`backend`].
//!
//! ```
//! use micromag::{Backend, Demag, Grid, Precision, make_uniform_state};
//!
//! let grid = Grid::cubic([4, 4, 4], 5e-9).unwrap();
//! let state = make_uniform_state(grid, [0.0, 0.0, 1.0], 8e5).unwrap();
//! let mut demag = Demag::new(&grid, Precision::F64, &Backend::serial()).unwrap();
//! let h = demag.field(&state.m).unwrap();
//! assert!(h.z.iter().all(|&hz| hz < 0.0));
//! ```

pub mod backend;
pub mod cli;
pub mod config;
pub mod demag;
pub mod dump;
pub mod dynamics;
pub mod error;
pub mod fft;
pub mod fields;
pub mod grid;
pub mod material;
pub mod oracle;
pub mod selftest;
pub mod sp3;
pub mod state;
pub mod vec3;
pub mod vector_field;

pub use backend::{Backend, BackendKind, Reduction, StepTiming};
pub use config::{parse_config, InitKind, ParsedConfig, SimSpec};
pub use demag::{Demag, DemagPipeline, DemagSpectrum, DemagTensorReal};
pub use dynamics::{relax, run, RunOutcome, Sample, Stepper, StepperConfig};
pub use error::{Error, Result};
pub use fft::{FftPlan, FftProvider, Precision};
pub use fields::{EffectiveField, ExternalField, FieldProvider, TermSet};
pub use grid::Grid;
pub use material::{MaterialParams, DEFAULT_GAMMA, MU0};
pub use state::{
    make_random_state, make_uniform_state, make_vortex_state, reduced_mean, CoreAxis,
    EnergyBreakdown, SimState,
};
pub use vec3::Vec3;
pub use vector_field::VectorField;
