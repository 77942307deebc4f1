//! Brute-force reference implementations.
//!
//! These are deliberately plain loops that share no code path with the FFT
//! pipeline, the transform provider or the tensor layout. They always run
//! in f64.

use num_complex::Complex64;

use crate::demag::newell::{demag_factors, XX, XY, XZ, YY, YZ, ZZ};
use crate::error::{Error, Result};
use crate::fft::FftProvider;
use crate::grid::Grid;
use crate::vector_field::VectorField;

/// Default source-cell cap for [`direct_demag`] (12³).
pub const DIRECT_DEMAG_CAP: usize = 12 * 12 * 12;
/// Lattice size cap for [`naive_dft3d`].
pub const NAIVE_DFT_CAP: usize = 4096;

/// Demag field by the direct triple sum over source cells.
pub fn direct_demag(m: &VectorField, grid: &Grid) -> Result<VectorField> {
    direct_demag_capped(m, grid, DIRECT_DEMAG_CAP)
}

pub fn direct_demag_capped(m: &VectorField, grid: &Grid, cap: usize) -> Result<VectorField> {
    m.check_grid(grid)?;
    let n = grid.cell_count();
    if n > cap {
        return Err(Error::CapExceeded { size: n, cap });
    }
    let (nx, ny, nz) = (grid.nx as isize, grid.ny as isize, grid.nz as isize);
    // Dense table over displacements, offset by n-1 per axis.
    let (ex, ey, ez) = (2 * nx - 1, 2 * ny - 1, 2 * nz - 1);
    let mut table = Vec::with_capacity((ex * ey * ez) as usize);
    for dz in -(nz - 1)..nz {
        for dy in -(ny - 1)..ny {
            for dx in -(nx - 1)..nx {
                table.push(demag_factors([dx, dy, dz], grid.cell_size()));
            }
        }
    }
    let kernel = |dx: isize, dy: isize, dz: isize| {
        &table[((dx + nx - 1) + ex * ((dy + ny - 1) + ey * (dz + nz - 1))) as usize]
    };
    let mut out = VectorField::zeros(*grid);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let mut h = [0.0; 3];
                for n3 in 0..nz {
                    for m3 in 0..ny {
                        for l in 0..nx {
                            let nf = kernel(i - l, j - m3, k - n3);
                            let src = m.get(grid.index(l as usize, m3 as usize, n3 as usize));
                            h[0] -= nf[XX] * src[0] + nf[XY] * src[1] + nf[XZ] * src[2];
                            h[1] -= nf[XY] * src[0] + nf[YY] * src[1] + nf[YZ] * src[2];
                            h[2] -= nf[XZ] * src[0] + nf[YZ] * src[1] + nf[ZZ] * src[2];
                        }
                    }
                }
                out.set(grid.index(i as usize, j as usize, k as usize), h);
            }
        }
    }
    Ok(out)
}

/// Linear convolution `H(i) = Σ_l M(l)·K(i - l)`, with `kernel[d + n - 1] = K(d)`.
pub fn direct_convolve_1d(m: &[f64], kernel: &[f64]) -> Result<Vec<f64>> {
    let n = m.len();
    if n == 0 || kernel.len() != 2 * n - 1 {
        return Err(Error::InvalidArgument(format!(
            "kernel length must be 2n-1 for n = {n}, got {}",
            kernel.len()
        )));
    }
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        for (l, &ml) in m.iter().enumerate() {
            *o += ml * kernel[i + n - 1 - l];
        }
    }
    Ok(out)
}

/// Direct `O(P²)` DFT of a real lattice with dims `(Px, Py, Pz)`, x fastest.
pub fn naive_dft3d(input: &[f64], dims: [usize; 3]) -> Result<Vec<Complex64>> {
    let complex: Vec<Complex64> = input.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    naive_dft3d_complex(&complex, dims, false)
}

/// Direct unnormalized DFT of a complex lattice; `inverse` flips the phase sign.
pub fn naive_dft3d_complex(
    input: &[Complex64],
    dims: [usize; 3],
    inverse: bool,
) -> Result<Vec<Complex64>> {
    let p: usize = dims.iter().product();
    if input.len() != p {
        return Err(crate::error::mismatch(p, input.len()));
    }
    if p > NAIVE_DFT_CAP {
        return Err(Error::CapExceeded {
            size: p,
            cap: NAIVE_DFT_CAP,
        });
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let tau = 2.0 * std::f64::consts::PI;
    let mut out = vec![Complex64::new(0.0, 0.0); p];
    for w in 0..dims[2] {
        for v in 0..dims[1] {
            for u in 0..dims[0] {
                let mut acc = Complex64::new(0.0, 0.0);
                for n in 0..dims[2] {
                    for m in 0..dims[1] {
                        for l in 0..dims[0] {
                            // Reduce each phase modulo its axis to keep arguments small.
                            let ph = tau
                                * (((u * l) % dims[0]) as f64 / dims[0] as f64
                                    + ((v * m) % dims[1]) as f64 / dims[1] as f64
                                    + ((w * n) % dims[2]) as f64 / dims[2] as f64);
                            let x = input[l + dims[0] * (m + dims[1] * n)];
                            acc += x * Complex64::new(ph.cos(), sign * ph.sin());
                        }
                    }
                }
                out[u + dims[0] * (v + dims[1] * w)] = acc;
            }
        }
    }
    Ok(out)
}

/// Transform provider backed by [`naive_dft3d_complex`], for checking the
/// demag pipeline independently of the FFT.
#[derive(Debug, Clone, Copy)]
pub struct NaiveDft {
    pub dims: [usize; 3],
}

impl FftProvider<f64> for NaiveDft {
    fn dims(&self) -> [usize; 3] {
        self.dims
    }

    fn forward(&self, data: &mut [Complex64]) -> Result<()> {
        let out = naive_dft3d_complex(data, self.dims, false)?;
        data.copy_from_slice(&out);
        Ok(())
    }

    fn inverse(&self, data: &mut [Complex64]) -> Result<()> {
        let out = naive_dft3d_complex(data, self.dims, true)?;
        let scale = 1.0 / out.len() as f64;
        for (d, o) in data.iter_mut().zip(out) {
            *d = o * scale;
        }
        Ok(())
    }
}

/// Default finite-difference step as a fraction of Ms.
pub const FD_STEP_FRACTION: f64 = 1e-3;

/// Central difference `(E(M + h e) - E(M - h e)) / 2h` for one component of one cell.
pub fn fd_gradient(
    mut energy: impl FnMut(&VectorField) -> f64,
    m: &VectorField,
    component: usize,
    cell: usize,
    h: f64,
) -> f64 {
    let mut probe = m.clone();
    let base = probe.component(component)[cell];
    probe.component_mut(component)[cell] = base + h;
    let plus = energy(&probe);
    probe.component_mut(component)[cell] = base - h;
    let minus = energy(&probe);
    (plus - minus) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::MU0;

    #[test]
    fn single_cell_self_term() {
        let g = Grid::cubic([1, 1, 1], 3e-9).unwrap();
        let m = VectorField::uniform(g, [0.0, 0.0, 8e5]);
        let h = direct_demag(&m, &g).unwrap().get(0);
        assert!(h[0].abs() < 1e-9 && h[1].abs() < 1e-9);
        assert!((h[2] + 8e5 / 3.0).abs() < 1e-12 * 8e5);
    }

    #[test]
    fn two_cell_hand_assembly() {
        let g = Grid::cubic([2, 1, 1], 1.0).unwrap();
        let ms = 8e5;
        let m = VectorField::uniform(g, [ms, 0.0, 0.0]);
        let h = direct_demag(&m, &g).unwrap().get(0);
        let self_xx = -demag_factors([0, 0, 0], [1.0; 3])[XX];
        let nb_xx = -demag_factors([1, 0, 0], [1.0; 3])[XX];
        assert!((h[0] - (self_xx + nb_xx) * ms).abs() <= 1e-12 * ms);
    }

    #[test]
    fn cap_enforced() {
        let g = Grid::cubic([13, 12, 12], 1.0).unwrap();
        let m = VectorField::zeros(g);
        assert!(matches!(
            direct_demag(&m, &g),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn translation_consistent() {
        let g = Grid::cubic([5, 4, 3], 1.0).unwrap();
        let src = |i, j, k| {
            let mut m = VectorField::zeros(g);
            m.set(g.index(i, j, k), [0.3, -0.5, 0.8]);
            m
        };
        let a = direct_demag(&src(1, 1, 1), &g).unwrap();
        let b = direct_demag(&src(2, 1, 1), &g).unwrap();
        for k in 0..3 {
            for j in 0..4 {
                for i in 0..4 {
                    assert_eq!(a.get(g.index(i, j, k)), b.get(g.index(i + 1, j, k)));
                }
            }
        }
    }

    #[test]
    fn convolve_1d_examples() {
        assert_eq!(
            direct_convolve_1d(&[1.0, 2.0, 3.0], &[0.0, 0.0, 1.0, 0.0, 0.0]).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        let (a, b, c) = (2.0, 3.0, 5.0);
        assert_eq!(
            direct_convolve_1d(&[1.0, 0.0], &[a, b, c]).unwrap(),
            vec![b, c]
        );
        assert!(direct_convolve_1d(&[1.0, 0.0], &[1.0]).is_err());
    }

    #[test]
    fn naive_dft_delta_and_symmetry() {
        let dims = [4, 2, 2];
        let mut x = vec![0.0; 16];
        x[0] = 1.0;
        let s = naive_dft3d(&x, dims).unwrap();
        assert!(s
            .iter()
            .all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-15));

        let x: Vec<f64> = (0..16).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let s = naive_dft3d(&x, dims).unwrap();
        for w in 0..2 {
            for v in 0..2 {
                for u in 0..4 {
                    let a = s[u + 4 * (v + 2 * w)];
                    let b = s[(4 - u) % 4 + 4 * ((2 - v) % 2 + 2 * ((2 - w) % 2))];
                    assert!((a - b.conj()).norm() < 1e-13);
                }
            }
        }
        assert!(naive_dft3d(&vec![0.0; 8192], [32, 16, 16]).is_err());
    }

    #[test]
    fn fd_gradient_polynomial_and_linear() {
        let g = Grid::cubic([2, 1, 1], 1.0).unwrap();
        let m = VectorField::from_fn(g, |i, _, _| [3.0 + i as f64, 1.0, 2.0]);
        let c = 0.7;
        let d = fd_gradient(|f| c * f.x[1] * f.x[1], &m, 0, 1, 1e-3);
        assert!((d - 2.0 * c * 4.0).abs() < 1e-9);

        let h_ext = [1e3, -2e3, 4e3];
        let v = 1e-27;
        let zeeman = |f: &VectorField| {
            -MU0 * v * f.iter().map(|mm| crate::vec3::dot(mm, h_ext)).sum::<f64>()
        };
        for comp in 0..3 {
            let d = fd_gradient(zeeman, &m, comp, 0, 1e-3);
            let want = -MU0 * v * h_ext[comp];
            assert!((d - want).abs() <= 1e-9 * want.abs());
        }
    }
}
