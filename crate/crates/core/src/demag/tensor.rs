use crate::backend::Backend;
use crate::error::{mismatch, Error, Result};
use crate::grid::Grid;

use super::newell::{apply_parity, normalized_cell, second_difference, LAYOUT};

/// Default padded size along an axis of `n` cells: the next power of two
/// `>= 2n` (2 for a single-cell axis).
pub fn padded_len(n: usize) -> usize {
    (2 * n).next_power_of_two().max(2)
}

pub fn padded_dims(grid: &Grid) -> [usize; 3] {
    grid.dims().map(padded_len)
}

/// Storage slot of displacement `d` on an axis of `n` cells padded to `p`.
///
/// Non-negative displacements map to themselves, negative ones wrap to `p + d`.
pub fn wrap_index(d: isize, n: usize, p: usize) -> Result<usize> {
    if d.unsigned_abs() >= n {
        return Err(Error::DisplacementOutOfRange { d, n });
    }
    if p + 1 < 2 * n {
        return Err(Error::InvalidArgument(format!(
            "padded size {p} too small for {n} cells"
        )));
    }
    Ok(if d >= 0 {
        d as usize
    } else {
        (p as isize + d) as usize
    })
}

/// Demag tensor `K` (with `H = K ∗ M`) over the padded lattice, six
/// symmetric components in wrap-around layout, zero outside the valid
/// displacement range.
#[derive(Debug, Clone, PartialEq)]
pub struct DemagTensorReal {
    pub grid: Grid,
    pub dims: [usize; 3],
    /// `[Kxx, Kyy, Kzz, Kxy, Kxz, Kyz]`.
    pub components: [Vec<f64>; 6],
}

impl DemagTensorReal {
    pub fn build(grid: &Grid, backend: &Backend) -> Result<Self> {
        Self::build_padded(grid, padded_dims(grid), backend)
    }

    /// Builds with explicit padded dims (each a power of two `>= 2n - 1`, and `>= 2`).
    pub fn build_padded(grid: &Grid, dims: [usize; 3], backend: &Backend) -> Result<Self> {
        let n = grid.dims();
        for a in 0..3 {
            if !(dims[a].is_power_of_two() && dims[a] >= 2) {
                return Err(Error::UnsupportedSize { size: dims[a] });
            }
            if dims[a] + 1 < 2 * n[a] {
                return Err(mismatch(
                    format!(">= {} along axis {a}", 2 * n[a] - 1),
                    dims[a],
                ));
            }
        }
        let octant = tabulated_octant(grid, backend);
        let len = dims[0] * dims[1] * dims[2];
        let mut components: [Vec<f64>; 6] = std::array::from_fn(|_| vec![0.0; len]);
        let (nx, ny, nz) = (n[0] as isize, n[1] as isize, n[2] as isize);
        for dz in -(nz - 1)..nz {
            let wz = wrap_index(dz, n[2], dims[2])?;
            for dy in -(ny - 1)..ny {
                let wy = wrap_index(dy, n[1], dims[1])?;
                for dx in -(nx - 1)..nx {
                    let wx = wrap_index(dx, n[0], dims[0])?;
                    let src =
                        dx.unsigned_abs() + n[0] * (dy.unsigned_abs() + n[1] * dz.unsigned_abs());
                    let mut v = octant[src];
                    apply_parity(&mut v, [dx, dy, dz]);
                    let dst = wx + dims[0] * (wy + dims[1] * wz);
                    for c in 0..6 {
                        components[c][dst] = -v[c];
                    }
                }
            }
        }
        Ok(Self {
            grid: *grid,
            dims,
            components,
        })
    }

    /// Six components at displacement `d` (observation minus source).
    pub fn at(&self, d: [isize; 3]) -> Result<[f64; 6]> {
        let n = self.grid.dims();
        let w = [
            wrap_index(d[0], n[0], self.dims[0])?,
            wrap_index(d[1], n[1], self.dims[1])?,
            wrap_index(d[2], n[2], self.dims[2])?,
        ];
        let idx = w[0] + self.dims[0] * (w[1] + self.dims[1] * w[2]);
        Ok(std::array::from_fn(|c| self.components[c][idx]))
    }

    /// Multiplies every entry by `s`.
    pub fn scale(&mut self, s: f64) {
        for c in &mut self.components {
            for v in c.iter_mut() {
                *v *= s;
            }
        }
    }
}

/// Positive demag factors `N` for every non-negative displacement
/// `0 <= d < n`, laid out like the grid itself.
///
/// Generator values are tabulated once per node and then combined with the
/// same 27-point second difference used by [`super::newell::demag_factors`],
/// so entries agree with the direct evaluation bit for bit.
fn tabulated_octant(grid: &Grid, backend: &Backend) -> Vec<[f64; 6]> {
    let n = grid.dims();
    let h = normalized_cell(grid.cell_size());
    let tables: Vec<(usize, [usize; 3], [f64; 3], Vec<f64>)> = LAYOUT
        .iter()
        .enumerate()
        .map(|(c, (gen, perm))| {
            // Node counts along the permuted axes: displacement + 1.
            let m = [n[perm[0]] + 1, n[perm[1]] + 1, n[perm[2]] + 1];
            let hp = [h[perm[0]], h[perm[1]], h[perm[2]]];
            let mut table = vec![0.0; m[0] * m[1] * m[2]];
            backend.map_scalar(&mut table, |idx| {
                let i = idx % m[0];
                let j = (idx / m[0]) % m[1];
                let k = idx / (m[0] * m[1]);
                gen.eval(i as f64 * hp[0], j as f64 * hp[1], k as f64 * hp[2])
            });
            (c, m, hp, table)
        })
        .collect();

    let count = grid.cell_count();
    let mut out = vec![[0.0; 6]; count];
    for (c, m, hp, table) in &tables {
        let perm = LAYOUT[*c].1;
        let mut vals = vec![0.0; count];
        backend.map_scalar(&mut vals, |idx| {
            let (i, j, k) = grid.unindex(idx);
            let d = [i, j, k];
            let ijk = [d[perm[0]], d[perm[1]], d[perm[2]]];
            second_difference(ijk, *hp, |a, b, cc| table[a + m[0] * (b + m[1] * cc)])
        });
        for (o, v) in out.iter_mut().zip(vals) {
            o[*c] = v;
        }
    }
    out
}
