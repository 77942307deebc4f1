use std::sync::Arc;

use micromag::demag::{convolve_1d_padded, DemagPipeline};
use micromag::oracle::{direct_convolve_1d, direct_demag, NaiveDft};
use micromag::selftest::relative_linf;
use micromag::{make_random_state, Backend, Demag, Grid, Precision, VectorField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fft_vs_direct(
    dims: [usize; 3],
    cell: [f64; 3],
    precision: Precision,
    backend: &Backend,
    seed: u64,
) -> f64 {
    let grid = Grid::new(dims, cell).unwrap();
    let state = make_random_state(grid, 8e5, seed).unwrap();
    let mut demag = Demag::new(&grid, precision, backend).unwrap();
    let h = demag.field(&state.m).unwrap();
    relative_linf(&h, &direct_demag(&state.m, &grid).unwrap())
}

#[test]
fn fft_matches_direct_on_odd_and_flat_grids() {
    let serial = Backend::serial();
    for (dims, cell) in [
        ([1, 1, 1], [2e-9, 2e-9, 2e-9]),
        ([3, 1, 1], [1e-9, 2e-9, 3e-9]),
        ([7, 5, 3], [3e-9, 3e-9, 1e-9]),
        ([6, 6, 1], [5e-9, 5e-9, 0.5e-9]),
        ([1, 9, 2], [2e-9, 1e-9, 4e-9]),
    ] {
        let err = fft_vs_direct(dims, cell, Precision::F64, &serial, 3);
        assert!(err <= 1e-11, "{dims:?}: {err:e}");
        let err = fft_vs_direct(dims, cell, Precision::F32, &serial, 3);
        assert!(err <= 1e-3, "{dims:?} f32: {err:e}");
    }
}

#[test]
fn parallel_backend_matches_direct() {
    let par = Backend::parallel(3).unwrap();
    let err = fft_vs_direct([6, 4, 5], [2e-9, 3e-9, 2.5e-9], Precision::F64, &par, 8);
    assert!(err <= 1e-11, "{err:e}");
}

#[test]
fn naive_dft_provider_gives_same_field() {
    // The pipeline built on a direct DFT shares no transform code with the FFT.
    let grid = Grid::new([3, 2, 2], [1e-9, 1.5e-9, 2e-9]).unwrap();
    let backend = Backend::serial();
    let dims = micromag::demag::padded_dims(&grid);
    let state = make_random_state(grid, 8e5, 21).unwrap();
    let mut naive =
        DemagPipeline::<f64>::with_provider(&grid, dims, Arc::new(NaiveDft { dims }), &backend)
            .unwrap();
    let mut h_naive = VectorField::zeros(grid);
    naive.compute(&state.m, &mut h_naive, None).unwrap();
    let mut fast = Demag::new(&grid, Precision::F64, &backend).unwrap();
    let h_fast = fast.field(&state.m).unwrap();
    assert!(relative_linf(&h_fast, &h_naive) < 1e-12);
    assert!(relative_linf(&h_naive, &direct_demag(&state.m, &grid).unwrap()) < 1e-11);
}

#[test]
fn larger_padding_does_not_change_the_field() {
    let grid = Grid::cubic([3, 3, 2], 2e-9).unwrap();
    let backend = Backend::serial();
    let state = make_random_state(grid, 8e5, 4).unwrap();
    let mut base = DemagPipeline::<f64>::new(&grid, &backend).unwrap();
    let mut wide = DemagPipeline::<f64>::with_padding(&grid, [16, 8, 8], &backend).unwrap();
    let mut a = VectorField::zeros(grid);
    let mut b = VectorField::zeros(grid);
    base.compute(&state.m, &mut a, None).unwrap();
    wide.compute(&state.m, &mut b, None).unwrap();
    assert!(relative_linf(&a, &b) < 1e-12);
    assert!(DemagPipeline::<f64>::with_padding(&grid, [4, 8, 8], &backend).is_err());
}

#[test]
fn convolution_1d_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=17 {
        let m: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let k: Vec<f64> = (0..2 * n - 1)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let fast = convolve_1d_padded(&m, &k).unwrap();
        let slow = direct_convolve_1d(&m, &k).unwrap();
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() <= 1e-12, "n = {n}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fft_demag_matches_direct_for_random_grids(
        nx in 1usize..6, ny in 1usize..6, nz in 1usize..5,
        ax in 0.5f64..3.0, ay in 0.5f64..3.0, seed in 0u64..1000,
    ) {
        let err = fft_vs_direct([nx, ny, nz], [ax * 1e-9, ay * 1e-9, 1e-9], Precision::F64, &Backend::serial(), seed);
        prop_assert!(err <= 1e-11, "{err:e}");
    }

    #[test]
    fn demag_is_linear(seed in 0u64..1000, a in -3.0f64..3.0) {
        let grid = Grid::cubic([4, 3, 2], 2e-9).unwrap();
        let backend = Backend::serial();
        let mut demag = Demag::new(&grid, Precision::F64, &backend).unwrap();
        let m1 = make_random_state(grid, 8e5, seed).unwrap().m;
        let m2 = make_random_state(grid, 8e5, seed + 1).unwrap().m;
        let mut combo = m1.clone();
        for c in 0..3 {
            for (x, y) in combo.component_mut(c).iter_mut().zip(m2.component(c)) {
                *x = a * *x + y;
            }
        }
        let h1 = demag.field(&m1).unwrap();
        let h2 = demag.field(&m2).unwrap();
        let mut expect = h1.clone();
        for c in 0..3 {
            for (x, y) in expect.component_mut(c).iter_mut().zip(h2.component(c)) {
                *x = a * *x + y;
            }
        }
        let h = demag.field(&combo).unwrap();
        prop_assert!(relative_linf(&h, &expect) < 1e-12);
    }
}
