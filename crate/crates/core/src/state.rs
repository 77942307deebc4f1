//! Simulation state, energy bookkeeping and initial conditions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::vec3::{cross, norm, scale, Vec3};
use crate::vector_field::VectorField;

/// Energies integrated over the sample volume, in joules.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyBreakdown {
    pub exchange: f64,
    pub anisotropy: f64,
    pub demag: f64,
    pub zeeman: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn new(exchange: f64, anisotropy: f64, demag: f64, zeeman: f64) -> Self {
        Self {
            exchange,
            anisotropy,
            demag,
            zeeman,
            total: exchange + anisotropy + demag + zeeman,
        }
    }

    /// Every term divided by `norm` (e.g. `Km·V` for reduced energies).
    pub fn scaled(&self, norm: f64) -> Self {
        Self::new(
            self.exchange / norm,
            self.anisotropy / norm,
            self.demag / norm,
            self.zeeman / norm,
        )
    }
}

/// Magnetization plus time bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub m: VectorField,
    /// Elapsed time, s.
    pub t: f64,
    pub step: u64,
    /// Energies of the current `m`, invalidated by every step.
    pub energy: Option<EnergyBreakdown>,
}

impl SimState {
    pub fn new(m: VectorField) -> Self {
        Self {
            m,
            t: 0.0,
            step: 0,
            energy: None,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.m.grid()
    }
}

/// Axis of a vortex core, with polarity given by the sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoreAxis {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
    PlusZ,
    MinusZ,
}

impl CoreAxis {
    pub fn axis_index(self) -> usize {
        match self {
            CoreAxis::PlusX | CoreAxis::MinusX => 0,
            CoreAxis::PlusY | CoreAxis::MinusY => 1,
            CoreAxis::PlusZ | CoreAxis::MinusZ => 2,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            CoreAxis::PlusX | CoreAxis::PlusY | CoreAxis::PlusZ => 1.0,
            _ => -1.0,
        }
    }

    pub fn unit(self) -> Vec3 {
        let mut v = [0.0; 3];
        v[self.axis_index()] = self.sign();
        v
    }
}

impl std::str::FromStr for CoreAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "+x" | "x" => CoreAxis::PlusX,
            "-x" => CoreAxis::MinusX,
            "+y" | "y" => CoreAxis::PlusY,
            "-y" => CoreAxis::MinusY,
            "+z" | "z" => CoreAxis::PlusZ,
            "-z" => CoreAxis::MinusZ,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "core axis must be one of +x,-x,+y,-y,+z,-z; got {other:?}"
                )))
            }
        })
    }
}

impl std::fmt::Display for CoreAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CoreAxis::PlusX => "+x",
            CoreAxis::MinusX => "-x",
            CoreAxis::PlusY => "+y",
            CoreAxis::MinusY => "-y",
            CoreAxis::PlusZ => "+z",
            CoreAxis::MinusZ => "-z",
        };
        f.write_str(s)
    }
}

fn check_ms(ms: f64) -> Result<()> {
    if ms.is_finite() && ms > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidMaterial(format!("Ms must be > 0, got {ms}")))
    }
}

/// Every cell set to `ms * direction`.
pub fn make_uniform_state(grid: Grid, direction: Vec3, ms: f64) -> Result<SimState> {
    check_ms(ms)?;
    if (norm(direction) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector, got {direction:?}"
        )));
    }
    Ok(SimState::new(VectorField::uniform(
        grid,
        scale(direction, ms),
    )))
}

/// Vortex circulating around `core` through the grid center.
///
/// A cell at perpendicular offset `r` from the center line points along
/// `core × r̂`, tilted toward the core direction by the polar angle
/// `θ = (π/2)·min(1, |r|/rc)` where `rc` is the smaller in-plane cell size.
/// The center line itself (|r| = 0) points exactly along the core.
pub fn make_vortex_state(grid: Grid, core: CoreAxis, ms: f64) -> Result<SimState> {
    check_ms(ms)?;
    let a = core.axis_index();
    let (p, q) = ((a + 1) % 3, (a + 2) % 3);
    let dims = grid.dims();
    let cell = grid.cell_size();
    if dims[p] < 2 || dims[q] < 2 {
        return Err(Error::InvalidGrid(format!(
            "vortex around {core} needs >= 2 cells along both perpendicular axes, grid is {dims:?}"
        )));
    }
    let axis = core.unit();
    let rc = cell[p].min(cell[q]);
    let center = |c: usize| 0.5 * (dims[c] as f64 - 1.0) * cell[c];
    let (cp, cq) = (center(p), center(q));
    let m = VectorField::from_fn(grid, |i, j, k| {
        let ijk = [i, j, k];
        let mut r = [0.0; 3];
        r[p] = ijk[p] as f64 * cell[p] - cp;
        r[q] = ijk[q] as f64 * cell[q] - cq;
        let rn = norm(r);
        if rn < 1e-12 * rc {
            return scale(axis, ms);
        }
        let swirl = scale(cross(axis, r), 1.0 / rn);
        let theta = std::f64::consts::FRAC_PI_2 * (rn / rc).min(1.0);
        let (s, c) = theta.sin_cos();
        let mut v = scale(swirl, s * ms);
        v[a] += c * ms * core.sign();
        if theta == std::f64::consts::FRAC_PI_2 {
            v[a] = 0.0;
        }
        v
    });
    Ok(SimState::new(m))
}

/// Independent uniformly distributed directions on the unit sphere, scaled by `ms`.
pub fn make_random_state(grid: Grid, ms: f64, seed: u64) -> Result<SimState> {
    check_ms(ms)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = VectorField::from_fn(grid, |_, _, _| {
        let v: [f64; 3] = UnitSphere.sample(&mut rng);
        scale(v, ms)
    });
    Ok(SimState::new(m))
}

/// Volume average of `M / ms`.
pub fn reduced_mean(state: &SimState, ms: f64) -> Vec3 {
    let m = &state.m;
    let n = m.len() as f64;
    let avg = |c: &[f64]| c.iter().sum::<f64>() / n / ms;
    [avg(&m.x), avg(&m.y), avg(&m.z)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: [usize; 3]) -> Grid {
        Grid::cubic(n, 5e-9).unwrap()
    }

    #[test]
    fn uniform_state() {
        let s = make_uniform_state(g([2, 2, 2]), [1.0, 0.0, 0.0], 8e5).unwrap();
        assert!(s.m.iter().all(|v| v == [8e5, 0.0, 0.0]));
        assert_eq!((s.t, s.step), (0.0, 0));

        let s = make_uniform_state(g([3, 1, 2]), [0.0, 0.0, 1.0], 1.0).unwrap();
        assert!(s.m.iter().all(|v| v == [0.0, 0.0, 1.0]));

        let d = std::f64::consts::FRAC_1_SQRT_2;
        let s = make_uniform_state(g([1, 1, 1]), [d, d, 0.0], 1e6).unwrap();
        assert!((norm(s.m.get(0)) - 1e6).abs() <= 1e-9 * 1e6);
    }

    #[test]
    fn uniform_state_errors() {
        assert!(make_uniform_state(g([1, 1, 1]), [1.0, 1.0, 0.0], 1.0).is_err());
        assert!(make_uniform_state(g([1, 1, 1]), [1.0, 0.0, 0.0], 0.0).is_err());
        assert!(make_uniform_state(g([1, 1, 1]), [1.0, 0.0, 0.0], -5.0).is_err());
    }

    #[test]
    fn vortex_small_grid() {
        let grid = g([3, 3, 1]);
        let s = make_vortex_state(grid, CoreAxis::PlusZ, 1.0).unwrap();
        assert_eq!(s.m.get(grid.index(1, 1, 0)), [0.0, 0.0, 1.0]);
        let east = s.m.get(grid.index(2, 1, 0));
        assert!(
            east[0].abs() < 1e-15 && (east[1] - 1.0).abs() < 1e-15 && east[2] == 0.0,
            "{east:?}"
        );
        let west = s.m.get(grid.index(0, 1, 0));
        assert!(
            west[0].abs() < 1e-15 && (west[1] + 1.0).abs() < 1e-15 && west[2] == 0.0,
            "{west:?}"
        );
    }

    #[test]
    fn vortex_symmetry_and_magnitude() {
        let ms = 8e5;
        let grid = g([16, 16, 16]);
        let s = make_vortex_state(grid, CoreAxis::PlusZ, ms).unwrap();
        for v in s.m.iter() {
            assert!((norm(v) / ms - 1.0).abs() < 1e-9);
        }
        let (mut sx, mut sy) = (0.0, 0.0);
        for v in s.m.iter() {
            sx += v[0];
            sy += v[1];
        }
        let n = grid.cell_count() as f64;
        assert!((sx / n).abs() <= 1e-9 * ms && (sy / n).abs() <= 1e-9 * ms);
        let mean = reduced_mean(&s, ms);
        assert!(mean[2] > 0.0 && mean[2] < 0.05, "{mean:?}");
    }

    #[test]
    fn vortex_other_axes() {
        let grid = g([1, 3, 3]);
        let s = make_vortex_state(grid, CoreAxis::MinusX, 2.0).unwrap();
        assert_eq!(s.m.get(grid.index(0, 1, 1)), [-2.0, 0.0, 0.0]);
        // -x × +y = -z
        let v = s.m.get(grid.index(0, 2, 1));
        assert!((v[2] + 2.0).abs() < 1e-12 && v[0] == 0.0, "{v:?}");
    }

    #[test]
    fn vortex_degenerate_grid() {
        assert!(make_vortex_state(g([1, 4, 4]), CoreAxis::PlusZ, 1.0).is_err());
        assert!(make_vortex_state(g([1, 4, 4]), CoreAxis::PlusX, 1.0).is_ok());
    }

    #[test]
    fn reduced_mean_examples() {
        let s = make_uniform_state(g([4, 2, 3]), [1.0, 0.0, 0.0], 7.0).unwrap();
        assert_eq!(reduced_mean(&s, 7.0), [1.0, 0.0, 0.0]);

        let grid = g([2, 1, 1]);
        let m = VectorField::from_fn(grid, |i, _, _| [if i == 0 { 3.0 } else { -3.0 }, 0.0, 0.0]);
        assert_eq!(reduced_mean(&SimState::new(m), 3.0), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn random_state_is_normalized_and_seeded() {
        let a = make_random_state(g([4, 4, 4]), 8e5, 7).unwrap();
        let b = make_random_state(g([4, 4, 4]), 8e5, 7).unwrap();
        assert_eq!(a, b);
        for v in a.m.iter() {
            assert!((norm(v) / 8e5 - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn core_axis_parse_roundtrip() {
        for s in ["+x", "-x", "+y", "-y", "+z", "-z"] {
            let a: CoreAxis = s.parse().unwrap();
            assert_eq!(a.to_string(), s);
        }
        assert!("w".parse::<CoreAxis>().is_err());
    }

    use proptest::prelude::*;
    proptest! {
        #[test]
        fn uniform_then_mean_recovers_direction(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            let n = (x * x + y * y + z * z).sqrt();
            prop_assume!(n > 1e-3);
            let d = [x / n, y / n, z / n];
            let s = make_uniform_state(g([3, 2, 2]), d, 8e5).unwrap();
            let mean = reduced_mean(&s, 8e5);
            for c in 0..3 {
                prop_assert!((mean[c] - d[c]).abs() <= 1e-12);
            }
        }
    }
}
