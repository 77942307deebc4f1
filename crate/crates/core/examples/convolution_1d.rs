//! Zero-padded FFT convolution of a short signal against the direct sum.

use micromag::demag::convolve_1d_padded;
use micromag::oracle::direct_convolve_1d;

fn main() -> micromag::Result<()> {
    let m = [1.0, -2.0, 0.5, 3.0, 0.0, 1.5];
    let n = m.len();
    // Kernel indexed by displacement d in -(n-1)..=(n-1).
    let kernel: Vec<f64> = (0..2 * n - 1)
        .map(|i| {
            let d = i as f64 - (n as f64 - 1.0);
            1.0 / (1.0 + d * d) + 0.1 * d
        })
        .collect();
    let fast = convolve_1d_padded(&m, &kernel)?;
    let slow = direct_convolve_1d(&m, &kernel)?;
    for (i, (f, s)) in fast.iter().zip(&slow).enumerate() {
        println!("{i}: fft {f:+.12} direct {s:+.12}");
    }
    let worst = fast
        .iter()
        .zip(&slow)
        .map(|(f, s)| (f - s).abs())
        .fold(0.0, f64::max);
    println!("max difference {worst:.2e}");
    Ok(())
}
