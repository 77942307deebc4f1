use crate::error::{mismatch, Result};
use crate::grid::Grid;
use crate::vec3::Vec3;

/// Per-cell 3-vector field stored as three contiguous component lattices.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.cell_count();
        Self {
            grid,
            x: vec![0.0; n],
            y: vec![0.0; n],
            z: vec![0.0; n],
        }
    }

    pub fn uniform(grid: Grid, v: Vec3) -> Self {
        let n = grid.cell_count();
        Self {
            grid,
            x: vec![v[0]; n],
            y: vec![v[1]; n],
            z: vec![v[2]; n],
        }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(usize, usize, usize) -> Vec3) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.cell_count() {
            let (i, j, k) = grid.unindex(idx);
            out.set(idx, f(i, j, k));
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    #[inline]
    pub fn get(&self, idx: usize) -> Vec3 {
        [self.x[idx], self.y[idx], self.z[idx]]
    }

    #[inline]
    pub fn set(&mut self, idx: usize, v: Vec3) {
        self.x[idx] = v[0];
        self.y[idx] = v[1];
        self.z[idx] = v[2];
    }

    pub fn component(&self, c: usize) -> &[f64] {
        match c {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("component index {c} out of range"),
        }
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        match c {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("component index {c} out of range"),
        }
    }

    pub fn components_mut(&mut self) -> [&mut [f64]; 3] {
        [&mut self.x, &mut self.y, &mut self.z]
    }

    pub fn fill(&mut self, v: Vec3) {
        self.x.fill(v[0]);
        self.y.fill(v[1]);
        self.z.fill(v[2]);
    }

    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        if self.grid.same_shape(grid) {
            Ok(())
        } else {
            Err(mismatch(grid, self.grid))
        }
    }

    pub fn copy_from(&mut self, other: &VectorField) -> Result<()> {
        other.check_grid(&self.grid)?;
        self.x.copy_from_slice(&other.x);
        self.y.copy_from_slice(&other.y);
        self.z.copy_from_slice(&other.z);
        Ok(())
    }

    /// `self += other`, component-wise.
    pub fn add_assign(&mut self, other: &VectorField) -> Result<()> {
        other.check_grid(&self.grid)?;
        for c in 0..3 {
            let src = other.component(c);
            for (a, b) in self.component_mut(c).iter_mut().zip(src) {
                *a += *b;
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec3> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// Largest per-cell Euclidean norm.
    pub fn max_norm(&self) -> f64 {
        self.iter().map(crate::vec3::norm).fold(0.0, f64::max)
    }

    /// Largest per-cell Euclidean norm of `self - other`.
    pub fn max_diff(&self, other: &VectorField) -> f64 {
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| crate::vec3::norm(crate::vec3::sub(a, b)))
            .fold(0.0, f64::max)
    }

    /// Rescale every cell to magnitude `ms`. Zero cells are left untouched.
    pub fn renormalize(&mut self, ms: f64) {
        for idx in 0..self.len() {
            let v = self.get(idx);
            let n = crate::vec3::norm(v);
            if n > 0.0 {
                self.set(idx, crate::vec3::scale(v, ms / n));
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x
            .iter()
            .chain(&self.y)
            .chain(&self.z)
            .all(|v| v.is_finite())
    }
}
