//! Undamped precession of a single cell in a static field.
//!
//! The measured period is compared with `2π / (γ μ0 H)`.

use std::f64::consts::PI;

use micromag::fields::ExternalField;
use micromag::{
    make_uniform_state, run, Backend, EffectiveField, Grid, MaterialParams, Precision,
    StepperConfig, TermSet, MU0,
};

fn main() -> micromag::Result<()> {
    let grid = Grid::cubic([1, 1, 1], 5e-9)?;
    let mut params = MaterialParams::permalloy();
    params.alpha = 0.0;
    let h = 1e5;
    let terms = TermSet {
        zeeman: true,
        ..TermSet::NONE
    };
    let mut field = EffectiveField::new(
        grid,
        params,
        terms,
        ExternalField::Uniform([0.0, 0.0, h]),
        Precision::F64,
        Backend::serial(),
    )?;
    let state = make_uniform_state(grid, [1.0, 0.0, 0.0], params.ms)?;
    let config = StepperConfig {
        dt: 1e-15,
        sample_every: 1,
        ..StepperConfig::default()
    };
    let expected = 2.0 * PI / (params.gamma * MU0 * h);
    let steps = (2.5 * expected / config.dt) as u64;
    let out = run(state, &mut field, config, steps)?;

    // Period from successive upward zero crossings of my.
    let crossings: Vec<f64> = out
        .log
        .windows(2)
        .filter(|w| w[0].m_mean[1] < 0.0 && w[1].m_mean[1] >= 0.0)
        .map(|w| {
            let (a, b) = (w[0].m_mean[1], w[1].m_mean[1]);
            w[0].t + (w[1].t - w[0].t) * (-a / (b - a))
        })
        .collect();
    let [first, second, ..] = crossings[..] else {
        return Err(micromag::Error::InvalidArgument(
            "fewer than two crossings".into(),
        ));
    };
    let measured = second - first;
    println!("expected period {:.4} ps", expected * 1e12);
    println!("measured period {:.4} ps", measured * 1e12);
    println!(
        "final |m| {:.12}",
        micromag::vec3::norm(out.state.m.get(0)) / params.ms
    );
    Ok(())
}
