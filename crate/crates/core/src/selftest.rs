//! Built-in verification suite: FFT demag against the direct sum, tensor
//! identities, and the energy gradient against the effective field.

use std::sync::Arc;

use crate::backend::Backend;
use crate::demag::newell::{demag_factors, XX, XY, XZ, YY, YZ, ZZ};
use crate::demag::{DemagPipeline, DemagTensorReal};
use crate::error::Result;
use crate::fft::{FftPlan, Precision, Real};
use crate::fields::{EffectiveField, ExternalField, FieldProvider, TermSet};
use crate::grid::Grid;
use crate::material::{MaterialParams, MU0};
use crate::oracle::{direct_demag, fd_gradient, FD_STEP_FRACTION};
use crate::state::make_random_state;
use crate::vector_field::VectorField;

/// Relative L∞ tolerance of FFT demag against the direct sum.
pub fn demag_tolerance(precision: Precision) -> f64 {
    match precision {
        Precision::F64 => 1e-11,
        Precision::F32 => 1e-3,
    }
}

pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const GRADIENT_TOLERANCE: f64 = 1e-6;

/// Grids used by the demag equivalence checks.
pub const SELFTEST_GRIDS: [[usize; 3]; 3] = [[4, 4, 4], [5, 3, 2], [8, 8, 1]];

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SelftestOptions {
    pub precision: Precision,
    /// Fault injection: negate the tensor before checking it.
    pub tamper_tensor_sign: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CheckResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn check(name: impl Into<String>, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail,
    }
}

/// `max |a - b| / max |b|` over all components.
pub fn relative_linf(a: &VectorField, b: &VectorField) -> f64 {
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for c in 0..3 {
        for (x, y) in a.component(c).iter().zip(b.component(c)) {
            diff = diff.max((x - y).abs());
            scale = scale.max(y.abs());
        }
    }
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn pipeline_field<T: Real>(
    tensor: &DemagTensorReal,
    m: &VectorField,
    backend: &Backend,
) -> Result<VectorField> {
    let plan: Arc<FftPlan<T>> = Arc::new(FftPlan::new(tensor.dims, backend.clone())?);
    let mut pipe = DemagPipeline::<T>::from_tensor(tensor, plan, backend)?;
    let mut out = VectorField::zeros(tensor.grid);
    pipe.compute(m, &mut out, None)?;
    Ok(out)
}

/// FFT demag vs direct sum on a random state; returns the relative L∞ error.
pub fn demag_equivalence_error(
    dims: [usize; 3],
    precision: Precision,
    seed: u64,
    tamper: bool,
    backend: &Backend,
) -> Result<f64> {
    let grid = Grid::new(dims, [3e-9, 4e-9, 5e-9])?;
    let state = make_random_state(grid, 8e5, seed)?;
    let mut tensor = DemagTensorReal::build(&grid, backend)?;
    if tamper {
        tensor.scale(-1.0);
    }
    let fft = match precision {
        Precision::F64 => pipeline_field::<f64>(&tensor, &state.m, backend)?,
        Precision::F32 => pipeline_field::<f32>(&tensor, &state.m, backend)?,
    };
    let direct = direct_demag(&state.m, &grid)?;
    Ok(relative_linf(&fft, &direct))
}

/// Self-term trace of `K = -N` (should be -1) for a cell shape.
pub fn self_trace(cell: [f64; 3], tamper: bool) -> f64 {
    let n = demag_factors([0, 0, 0], cell);
    let sign = if tamper { 1.0 } else { -1.0 };
    sign * (n[XX] + n[YY] + n[ZZ])
}

/// Number of displacements on an `n³` tensor violating the exact parity and
/// permutation symmetries.
pub fn symmetry_violations(n: usize, cell: [f64; 3], backend: &Backend) -> Result<usize> {
    let grid = Grid::new([n, n, n], cell)?;
    let t = DemagTensorReal::build(&grid, backend)?;
    let r = n as isize - 1;
    let mut bad = 0;
    for dz in -r..=r {
        for dy in -r..=r {
            for dx in -r..=r {
                let a = t.at([dx, dy, dz])?;
                let b = t.at([dx.abs(), dy.abs(), dz.abs()])?;
                let (sx, sy, sz) = (dx.signum() as f64, dy.signum() as f64, dz.signum() as f64);
                let expect = [
                    b[XX],
                    b[YY],
                    b[ZZ],
                    b[XY] * sx * sy,
                    b[XZ] * sx * sz,
                    b[YZ] * sy * sz,
                ];
                if a.iter()
                    .zip(&expect)
                    .any(|(p, q)| p.to_bits() != q.to_bits() && p != q)
                {
                    bad += 1;
                }
            }
        }
    }
    Ok(bad)
}

/// Worst relative mismatch between `-μ0 V H_eff` and the central-difference
/// gradient of the total energy, over every component of every cell.
pub fn gradient_error(seed: u64, backend: &Backend) -> Result<f64> {
    let grid = Grid::new([3, 3, 3], [2e-9, 2.5e-9, 3e-9])?;
    let params = MaterialParams {
        ku: 5e4,
        easy_axis: [0.6, 0.0, 0.8],
        ..MaterialParams::permalloy()
    };
    let mut field = EffectiveField::new(
        grid,
        params,
        TermSet::ALL,
        ExternalField::Uniform([2e4, -1e4, 3e4]),
        Precision::F64,
        backend.clone(),
    )?;
    let state = make_random_state(grid, params.ms, seed)?;
    let mut h = VectorField::zeros(grid);
    field.effective_field(&state.m, &mut h, None)?;
    let v = grid.cell_volume();
    let step = FD_STEP_FRACTION * params.ms;
    let mut worst: f64 = 0.0;
    for cell in 0..grid.cell_count() {
        for c in 0..3 {
            let analytic = -MU0 * v * h.component(c)[cell];
            let numeric = fd_gradient(
                |m| field.energies(m).map(|e| e.total).unwrap_or(f64::NAN),
                &state.m,
                c,
                cell,
                step,
            );
            worst = worst.max((numeric - analytic).abs() / analytic.abs());
        }
    }
    Ok(worst)
}

/// Runs every check.
pub fn run_selftest(options: SelftestOptions) -> Vec<CheckResult> {
    let backend = Backend::serial();
    let mut out = Vec::new();
    let tol = demag_tolerance(options.precision);
    for (s, dims) in SELFTEST_GRIDS.iter().enumerate() {
        let name = format!(
            "demag fft vs direct {}x{}x{} ({})",
            dims[0], dims[1], dims[2], options.precision
        );
        out.push(
            match demag_equivalence_error(
                *dims,
                options.precision,
                100 + s as u64,
                options.tamper_tensor_sign,
                &backend,
            ) {
                Ok(e) => check(
                    name,
                    e <= tol,
                    format!("relative L-inf {e:.3e} (tolerance {tol:.0e})"),
                ),
                Err(e) => check(name, false, e.to_string()),
            },
        );
    }
    for cell in [[1.0, 1.0, 1.0], [1.0, 1.0, 5.0], [2.0, 3.0, 4.0]] {
        let tr = self_trace(cell, options.tamper_tensor_sign);
        out.push(check(
            format!("self-term trace {}:{}:{}", cell[0], cell[1], cell[2]),
            (tr + 1.0).abs() <= TRACE_TOLERANCE,
            format!("trace {tr:.15}"),
        ));
    }
    out.push(match symmetry_violations(5, [1.0, 1.3, 0.7], &backend) {
        Ok(n) => check("tensor parity 5x5x5", n == 0, format!("{n} violations")),
        Err(e) => check("tensor parity 5x5x5", false, e.to_string()),
    });
    out.push(match gradient_error(7, &backend) {
        Ok(e) => check(
            "energy gradient vs H_eff",
            e <= GRADIENT_TOLERANCE,
            format!("max relative error {e:.3e} (tolerance {GRADIENT_TOLERANCE:.0e})"),
        ),
        Err(e) => check("energy gradient vs H_eff", false, e.to_string()),
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        for precision in [Precision::F64, Precision::F32] {
            let results = run_selftest(SelftestOptions {
                precision,
                tamper_tensor_sign: false,
            });
            for r in &results {
                assert!(r.passed, "{r}");
            }
        }
    }

    #[test]
    fn tampered_sign_fails_trace() {
        let results = run_selftest(SelftestOptions {
            precision: Precision::F64,
            tamper_tensor_sign: true,
        });
        assert!(results
            .iter()
            .filter(|r| r.name.starts_with("self-term trace"))
            .all(|r| !r.passed));
        assert!(results
            .iter()
            .filter(|r| r.name.starts_with("demag fft"))
            .all(|r| !r.passed));
    }
}
