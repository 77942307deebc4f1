//! Standard Problem #3 energy crossover between the flower and vortex states.
//!
//! ```text
//! cargo run --release --example sp3_crossover -- 8 9
//! ```

use std::time::Instant;

use micromag::sp3::{Sp3Comparison, Sp3Settings};

fn main() -> micromag::Result<()> {
    let mut edges: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    if edges.is_empty() {
        edges = vec![8.0, 9.0];
    }
    let settings = Sp3Settings::default();
    println!("edge/l_ex  state   steps  converged  E_total/(Km V)  <mz>");
    for edge in edges {
        let t0 = Instant::now();
        let c = Sp3Comparison::run(edge, &settings)?;
        for r in [&c.flower, &c.vortex] {
            println!(
                "{:9.3}  {:6}  {:6}  {:9}  {:14.6}  {:+.4}",
                edge, r.start, r.steps, r.converged, r.reduced.total, r.m_mean[2]
            );
        }
        println!(
            "  ground state: {} ({:.1} s)",
            c.ground_state(),
            t0.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
