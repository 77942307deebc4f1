//! Standard Problem #3: a cube with uniaxial anisotropy along one edge,
//! relaxed from a flower-like (uniform) start and from a vortex start.
//!
//! Lengths are in units of the exchange length `l_ex = sqrt(2A/(μ0 Ms²))`,
//! energies in units of `Km V` with `Km = ½ μ0 Ms²` and `V` the cube volume.
//! The anisotropy constant is `Ku = 0.1 Km`, easy axis `z`. Below the
//! crossover edge (about 8.47 `l_ex`) the flower state has the lower energy,
//! above it the vortex.

use crate::backend::BackendKind;
use crate::config::{InitKind, OutputSpec, SimSpec};
use crate::dynamics::{relax, StepperConfig};
use crate::error::Result;
use crate::fft::Precision;
use crate::fields::{FieldProvider, TermSet};
use crate::grid::Grid;
use crate::material::{MaterialParams, DEFAULT_GAMMA};
use crate::state::{reduced_mean, CoreAxis, EnergyBreakdown};
use crate::vec3::Vec3;

pub const SP3_MS: f64 = 8e5;
pub const SP3_A: f64 = 1.3e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sp3Start {
    /// Uniform along the easy axis; relaxes into the flower state.
    Flower,
    /// Vortex curling around `x`, perpendicular to the easy axis.
    Vortex,
}

impl std::fmt::Display for Sp3Start {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sp3Start::Flower => "flower",
            Sp3Start::Vortex => "vortex",
        })
    }
}

/// Numerical settings for the harness. Damping only shapes the path to the
/// minimum, so a large `alpha` is used to get there in few steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sp3Settings {
    /// Cells per cube edge.
    pub n: usize,
    pub alpha: f64,
    pub stepper: StepperConfig,
    pub backend: BackendKind,
    pub threads: usize,
    pub precision: Precision,
}

impl Default for Sp3Settings {
    fn default() -> Self {
        Self {
            n: 16,
            alpha: 1.0,
            stepper: StepperConfig {
                dt: 1e-13,
                renormalize_every: 1,
                max_steps: 200_000,
                torque_tol: 0.05,
                sample_every: 1000,
            },
            backend: BackendKind::Parallel,
            threads: 0,
            precision: Precision::F64,
        }
    }
}

pub fn sp3_material(alpha: f64) -> MaterialParams {
    let mut p = MaterialParams {
        a_ex: SP3_A,
        ku: 0.0,
        ms: SP3_MS,
        alpha,
        gamma: DEFAULT_GAMMA,
        easy_axis: [0.0, 0.0, 1.0],
    };
    p.ku = 0.1 * p.km();
    p
}

/// Simulation spec for a cube of edge `edge_lex · l_ex`.
pub fn sp3_spec(edge_lex: f64, start: Sp3Start, settings: &Sp3Settings) -> Result<SimSpec> {
    let material = sp3_material(settings.alpha);
    material.validate()?;
    let n = settings.n;
    let cell = edge_lex * material.exchange_length() / n as f64;
    let grid = Grid::cubic([n, n, n], cell)?;
    let init = match start {
        Sp3Start::Flower => InitKind::Uniform([0.0, 0.0, 1.0]),
        Sp3Start::Vortex => InitKind::Vortex(CoreAxis::PlusX),
    };
    Ok(SimSpec {
        grid,
        material,
        terms: TermSet {
            zeeman: false,
            ..TermSet::ALL
        },
        external: [0.0; 3],
        init,
        stepper: settings.stepper,
        backend: settings.backend,
        threads: settings.threads,
        precision: settings.precision,
        output: OutputSpec {
            csv: format!("sp3_{start}_{edge_lex}.csv").into(),
            dump: format!("sp3_{start}_{edge_lex}.dump").into(),
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sp3Result {
    pub edge_lex: f64,
    pub start: Sp3Start,
    pub converged: bool,
    pub steps: u64,
    /// Joules.
    pub energy: EnergyBreakdown,
    /// In units of `Km V`.
    pub reduced: EnergyBreakdown,
    pub m_mean: Vec3,
}

pub fn relax_sp3(edge_lex: f64, start: Sp3Start, settings: &Sp3Settings) -> Result<Sp3Result> {
    let spec = sp3_spec(edge_lex, start, settings)?;
    let mut provider = spec.field_provider(spec.make_backend()?)?;
    let outcome = relax(spec.initial_state()?, &mut provider, spec.stepper)?;
    let energy = provider.energies(&outcome.state.m)?;
    let volume = spec.grid.cell_volume() * spec.grid.cell_count() as f64;
    Ok(Sp3Result {
        edge_lex,
        start,
        converged: outcome.converged,
        steps: outcome.state.step,
        energy,
        reduced: energy.scaled(spec.material.km() * volume),
        m_mean: reduced_mean(&outcome.state, spec.material.ms),
    })
}

/// Both relaxations at one edge length.
#[derive(Debug, Clone, PartialEq)]
pub struct Sp3Comparison {
    pub flower: Sp3Result,
    pub vortex: Sp3Result,
}

impl Sp3Comparison {
    pub fn run(edge_lex: f64, settings: &Sp3Settings) -> Result<Self> {
        Ok(Self {
            flower: relax_sp3(edge_lex, Sp3Start::Flower, settings)?,
            vortex: relax_sp3(edge_lex, Sp3Start::Vortex, settings)?,
        })
    }

    /// The lower-energy state.
    pub fn ground_state(&self) -> Sp3Start {
        if self.flower.energy.total < self.vortex.energy.total {
            Sp3Start::Flower
        } else {
            Sp3Start::Vortex
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn material_convention() {
        let p = sp3_material(0.5);
        assert!((p.ku / p.km() - 0.1).abs() < 1e-15);
        let lex = p.exchange_length();
        assert!((lex - 5.686e-9).abs() < 1e-11, "{lex}");
    }

    #[test]
    fn spec_geometry() {
        let s = sp3_spec(8.0, Sp3Start::Vortex, &Sp3Settings::default()).unwrap();
        let edge = s.grid.dx * s.grid.nx as f64;
        assert!((edge / s.material.exchange_length() - 8.0).abs() < 1e-12);
        assert_eq!(s.init, InitKind::Vortex(CoreAxis::PlusX));
        assert!(!s.terms.zeeman && s.terms.demag);
    }

    #[test]
    fn tiny_cube_prefers_flower() {
        let settings = Sp3Settings {
            n: 4,
            backend: BackendKind::Serial,
            ..Sp3Settings::default()
        };
        let c = Sp3Comparison::run(4.0, &settings).unwrap();
        assert_eq!(c.ground_state(), Sp3Start::Flower);
        assert!(c.flower.m_mean[2] > 0.9);
    }
}
