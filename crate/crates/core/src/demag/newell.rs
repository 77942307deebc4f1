//! Cell-averaged demagnetization factors between two rectangular cells
//! (Newell, Williams & Dunlop closed forms).
//!
//! Values here are the positive demag factors `N` (self-term trace +1); the
//! tensor used by the convolution is `K = -N`. Displacements are given in
//! whole cells. All evaluation folds the displacement to the non-negative
//! octant and restores the sign of the off-diagonal terms afterwards, so the
//! parity relations hold exactly.

use std::f64::consts::PI;

/// Component order used for all six-component arrays.
pub const XX: usize = 0;
pub const YY: usize = 1;
pub const ZZ: usize = 2;
pub const XY: usize = 3;
pub const XZ: usize = 4;
pub const YZ: usize = 5;

/// Axis permutation and generating function for each component.
pub(crate) const LAYOUT: [(Generator, [usize; 3]); 6] = [
    (Generator::F, [0, 1, 2]),
    (Generator::F, [1, 0, 2]),
    (Generator::F, [2, 1, 0]),
    (Generator::G, [0, 1, 2]),
    (Generator::G, [0, 2, 1]),
    (Generator::G, [1, 2, 0]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Generator {
    F,
    G,
}

impl Generator {
    #[inline]
    pub(crate) fn eval(self, x: f64, y: f64, z: f64) -> f64 {
        match self {
            Generator::F => newell_f(x, y, z),
            Generator::G => newell_g(x, y, z),
        }
    }
}

/// Diagonal generating function; arguments must be non-negative.
pub fn newell_f(x: f64, y: f64, z: f64) -> f64 {
    let (x2, y2, z2) = (x * x, y * y, z * z);
    let r = (x2 + y2 + z2).sqrt();
    let mut out = (2.0 * x2 - y2 - z2) * r / 6.0;
    if y > 0.0 && x2 + z2 > 0.0 {
        out += 0.5 * y * (z2 - x2) * (y / (x2 + z2).sqrt()).asinh();
    }
    if z > 0.0 && x2 + y2 > 0.0 {
        out += 0.5 * z * (y2 - x2) * (z / (x2 + y2).sqrt()).asinh();
    }
    if x > 0.0 && y > 0.0 && z > 0.0 {
        out -= x * y * z * (y * z / (x * r)).atan();
    }
    out
}

/// Off-diagonal generating function; arguments must be non-negative.
pub fn newell_g(x: f64, y: f64, z: f64) -> f64 {
    let (x2, y2, z2) = (x * x, y * y, z * z);
    let r = (x2 + y2 + z2).sqrt();
    let mut out = -x * y * r / 3.0;
    if x > 0.0 && y > 0.0 && z > 0.0 {
        out += x * y * z * (z / (x2 + y2).sqrt()).asinh();
    }
    if y > 0.0 && x > 0.0 {
        out += y / 6.0 * (3.0 * z2 - y2) * (x / (y2 + z2).sqrt()).asinh();
        out += x / 6.0 * (3.0 * z2 - x2) * (y / (x2 + z2).sqrt()).asinh();
    }
    if z > 0.0 {
        if x > 0.0 && y > 0.0 {
            out -= z2 * z / 6.0 * (x * y / (z * r)).atan();
        }
        if y > 0.0 {
            out -= 0.5 * z * y2 * (x * z / (y * r)).atan();
        }
        if x > 0.0 {
            out -= 0.5 * z * x2 * (y * z / (x * r)).atan();
        }
    }
    out
}

/// Second-difference weights: 2 at the center, -1 at the neighbors.
#[inline]
pub(crate) fn weight(a: isize) -> f64 {
    if a == 0 {
        2.0
    } else {
        -1.0
    }
}

/// Sum of `w(a)w(b)w(c)·gen(|i+a|h0, |j+b|h1, |k+c|h2)` over the 27 offsets,
/// divided by `4π h0 h1 h2`. `lookup` supplies the generator value at a node.
#[inline]
pub(crate) fn second_difference(
    ijk: [usize; 3],
    h: [f64; 3],
    mut lookup: impl FnMut(usize, usize, usize) -> f64,
) -> f64 {
    let mut acc = 0.0;
    for c in -1isize..=1 {
        let kk = (ijk[2] as isize + c).unsigned_abs();
        for b in -1isize..=1 {
            let jj = (ijk[1] as isize + b).unsigned_abs();
            let wbc = weight(b) * weight(c);
            for a in -1isize..=1 {
                let ii = (ijk[0] as isize + a).unsigned_abs();
                acc += weight(a) * wbc * lookup(ii, jj, kk);
            }
        }
    }
    acc / (4.0 * PI * h[0] * h[1] * h[2])
}

/// Cell sizes rescaled so the largest is 1 (the factors are scale free).
pub(crate) fn normalized_cell(cell: [f64; 3]) -> [f64; 3] {
    let s = cell[0].max(cell[1]).max(cell[2]);
    [cell[0] / s, cell[1] / s, cell[2] / s]
}

/// All six demag factors for a displacement of `d` whole cells, evaluated
/// directly (27 generator calls per component).
pub fn demag_factors(d: [isize; 3], cell: [f64; 3]) -> [f64; 6] {
    let h = normalized_cell(cell);
    let abs = [
        d[0].unsigned_abs(),
        d[1].unsigned_abs(),
        d[2].unsigned_abs(),
    ];
    let mut out = [0.0; 6];
    for (c, (gen, perm)) in LAYOUT.iter().enumerate() {
        let ijk = [abs[perm[0]], abs[perm[1]], abs[perm[2]]];
        let hp = [h[perm[0]], h[perm[1]], h[perm[2]]];
        out[c] = second_difference(ijk, hp, |i, j, k| {
            gen.eval(i as f64 * hp[0], j as f64 * hp[1], k as f64 * hp[2])
        });
    }
    apply_parity(&mut out, d);
    out
}

/// Restores off-diagonal signs for a displacement folded into the positive octant.
#[inline]
pub(crate) fn apply_parity(n: &mut [f64; 6], d: [isize; 3]) {
    let s = [
        d[0].signum() as f64,
        d[1].signum() as f64,
        d[2].signum() as f64,
    ];
    n[XY] *= s[0] * s[1];
    n[XZ] *= s[0] * s[2];
    n[YZ] *= s[1] * s[2];
    for v in &mut n[XY..] {
        if *v == 0.0 {
            *v = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_self_term() {
        let n = demag_factors([0, 0, 0], [1.0, 1.0, 1.0]);
        for c in [XX, YY, ZZ] {
            assert!((n[c] - 1.0 / 3.0).abs() < 1e-12, "{n:?}");
        }
        for c in [XY, XZ, YZ] {
            assert_eq!(n[c], 0.0);
        }
    }

    #[test]
    fn self_trace_is_one() {
        for cell in [
            [1.0, 1.0, 5.0],
            [2.0, 3.0, 4.0],
            [5e-9, 5e-9, 1e-9],
            [1.0, 0.1, 0.3],
        ] {
            let n = demag_factors([0, 0, 0], cell);
            assert!(
                (n[XX] + n[YY] + n[ZZ] - 1.0).abs() < 1e-12,
                "{cell:?}: {n:?}"
            );
        }
    }

    #[test]
    fn thin_plate_self_term() {
        // Flat cell: almost all of the factor sits on the short axis.
        let n = demag_factors([0, 0, 0], [10.0, 10.0, 0.1]);
        assert!(n[ZZ] > 0.95 && n[XX] < 0.02, "{n:?}");
    }

    #[test]
    fn parity() {
        let cell = [1.0, 1.3, 0.7];
        let base = demag_factors([2, 1, 3], cell);
        for sx in [-1isize, 1] {
            for sy in [-1isize, 1] {
                for sz in [-1isize, 1] {
                    let n = demag_factors([2 * sx, sy, 3 * sz], cell);
                    assert_eq!(n[XX], base[XX]);
                    assert_eq!(n[XY], base[XY] * (sx * sy) as f64);
                    assert_eq!(n[XZ], base[XZ] * (sx * sz) as f64);
                    assert_eq!(n[YZ], base[YZ] * (sy * sz) as f64);
                }
            }
        }
    }

    #[test]
    fn scale_free() {
        let a = demag_factors([3, -1, 2], [1.0, 2.0, 3.0]);
        let b = demag_factors([3, -1, 2], [1e-9, 2e-9, 3e-9]);
        for c in 0..6 {
            assert!((a[c] - b[c]).abs() < 1e-11 * a[c].abs(), "{a:?} {b:?}");
        }
    }
}
