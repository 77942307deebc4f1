use micromag::fft::{plan_for, FftPlan, FftProvider};
use micromag::oracle::naive_dft3d;
use micromag::Backend;
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn idx(d: [usize; 3], u: usize, v: usize, w: usize) -> usize {
    u + d[0] * (v + d[1] * w)
}

#[test]
fn matches_naive_dft() {
    for dims in [[2, 2, 2], [4, 8, 2], [16, 4, 4], [8, 8, 8]] {
        let n = dims.iter().product();
        let x = random(n, 1);
        let fast = plan_for::<f64>(dims).unwrap().forward3d(&x).unwrap();
        let slow = naive_dft3d(&x, dims).unwrap();
        let scale = slow.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (a, b) in fast.data.iter().zip(&slow) {
            assert!((a - b).norm() <= 1e-12 * scale, "{dims:?}");
        }
    }
}

#[test]
fn real_input_has_conjugate_symmetric_spectrum() {
    let d = [8, 4, 16];
    let s = plan_for::<f64>(d)
        .unwrap()
        .forward3d(&random(512, 2))
        .unwrap();
    for w in 0..d[2] {
        for v in 0..d[1] {
            for u in 0..d[0] {
                let a = s.data[idx(d, u, v, w)];
                let b = s.data[idx(d, (d[0] - u) % d[0], (d[1] - v) % d[1], (d[2] - w) % d[2])];
                assert!((a - b.conj()).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn convolution_theorem() {
    // Circular convolution via the transform equals the direct circular sum.
    let d = [4, 4, 8];
    let n = 128;
    let a = random(n, 3);
    let b = random(n, 4);
    let plan = plan_for::<f64>(d).unwrap();
    let fa = plan.forward3d(&a).unwrap();
    let mut fb = plan.forward3d(&b).unwrap();
    for (x, y) in fb.data.iter_mut().zip(&fa.data) {
        *x *= y;
    }
    let conv = plan.inverse3d(&fb).unwrap();
    for w in 0..d[2] {
        for v in 0..d[1] {
            for u in 0..d[0] {
                let mut acc = 0.0;
                for z in 0..d[2] {
                    for y in 0..d[1] {
                        for x in 0..d[0] {
                            let s = idx(
                                d,
                                (u + d[0] - x) % d[0],
                                (v + d[1] - y) % d[1],
                                (w + d[2] - z) % d[2],
                            );
                            acc += a[idx(d, x, y, z)] * b[s];
                        }
                    }
                }
                assert!((conv[idx(d, u, v, w)] - acc).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn parallel_plan_is_bitwise_identical() {
    let d = [32, 16, 8];
    let x = random(4096, 5);
    let a = FftPlan::<f64>::new(d, Backend::serial())
        .unwrap()
        .forward3d(&x)
        .unwrap();
    let b = FftPlan::<f64>::new(d, Backend::parallel(4).unwrap())
        .unwrap()
        .forward3d(&x)
        .unwrap();
    assert!(a
        .data
        .iter()
        .zip(&b.data)
        .all(|(p, q)| p.re.to_bits() == q.re.to_bits() && p.im.to_bits() == q.im.to_bits()));
}

#[test]
fn inverse_normalization() {
    let plan = plan_for::<f64>([4, 2, 2]).unwrap();
    let mut ones = vec![Complex::new(0.0, 0.0); 16];
    ones[0] = Complex::new(16.0, 0.0);
    plan.inverse(&mut ones).unwrap();
    assert!(ones
        .iter()
        .all(|c| (c.re - 1.0).abs() < 1e-15 && c.im.abs() < 1e-15));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn linearity_and_roundtrip(ex in 1u32..5, ey in 1u32..5, ez in 1u32..5, seed in 0u64..10_000, a in -4.0f64..4.0) {
        let d = [1usize << ex, 1 << ey, 1 << ez];
        let n = d.iter().product();
        let plan = plan_for::<f64>(d).unwrap();
        let x = random(n, seed);
        let y = random(n, seed ^ 0xabc);
        let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + q).collect();
        let fx = plan.forward3d(&x).unwrap();
        let fy = plan.forward3d(&y).unwrap();
        let fxy = plan.forward3d(&xy).unwrap();
        let scale = n as f64 * 5.0;
        for ((p, q), r) in fx.data.iter().zip(&fy.data).zip(&fxy.data) {
            prop_assert!((p * a + q - r).norm() < 1e-12 * scale);
        }
        let back = plan.inverse3d(&fx).unwrap();
        for (p, q) in back.iter().zip(&x) {
            prop_assert!((p - q).abs() < 1e-13);
        }
    }
}
