//! Per-step timing breakdown for growing cubes.
//!
//! ```text
//! cargo run --release --example bench_scaling -- 8 16 32
//! ```

use micromag::cli::{bench_size, default_bench_template, format_bench_csv, BenchRow};

fn main() -> micromag::Result<()> {
    let mut sizes: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    if sizes.is_empty() {
        sizes = vec![8, 16, 32];
    }
    let template = default_bench_template();
    let rows = sizes
        .into_iter()
        .map(|n| {
            Ok(BenchRow {
                n,
                timing: bench_size(&template, n, 20)?,
            })
        })
        .collect::<micromag::Result<Vec<_>>>()?;
    print!("{}", format_bench_csv(&rows));
    Ok(())
}
