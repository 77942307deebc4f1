use crate::error::{Error, Result};

/// Rectangular finite-difference mesh: `nx × ny × nz` cells of size `dx × dy × dz` (meters).
///
/// Cells are addressed with zero-based `(i, j, k)`; the linear index is
/// `i + nx * (j + ny * k)` so `x` varies fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl Grid {
    pub fn new(n: [usize; 3], cell: [f64; 3]) -> Result<Self> {
        if n.contains(&0) {
            return Err(Error::InvalidGrid(format!(
                "cell counts must be >= 1, got {n:?}"
            )));
        }
        if cell.iter().any(|&d| !(d.is_finite() && d > 0.0)) {
            return Err(Error::InvalidGrid(format!(
                "cell sizes must be finite and > 0, got {cell:?}"
            )));
        }
        Ok(Self {
            nx: n[0],
            ny: n[1],
            nz: n[2],
            dx: cell[0],
            dy: cell[1],
            dz: cell[2],
        })
    }

    /// Cubic cells of edge `d`.
    pub fn cubic(n: [usize; 3], d: f64) -> Result<Self> {
        Self::new(n, [d, d, d])
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn cell_size(&self) -> [f64; 3] {
        [self.dx, self.dy, self.dz]
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy * self.dz
    }

    pub fn min_cell_size(&self) -> f64 {
        self.dx.min(self.dy).min(self.dz)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny && k < self.nz);
        i + self.nx * (j + self.ny * k)
    }

    #[inline]
    pub fn unindex(&self, idx: usize) -> (usize, usize, usize) {
        let i = idx % self.nx;
        let rest = idx / self.nx;
        (i, rest % self.ny, rest / self.ny)
    }

    /// Same cell counts and identical cell sizes.
    pub fn same_shape(&self, other: &Grid) -> bool {
        self == other
    }
}
