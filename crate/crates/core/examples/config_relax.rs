//! Parses a configuration text, relaxes it and prints the trajectory CSV.

use micromag::cli::format_trajectory_csv;
use micromag::parse_config;

const CONFIG: &str = "\
grid.nx = 6
grid.ny = 6
grid.nz = 2
grid.dx = 5e-9
grid.dy = 5e-9
grid.dz = 5e-9
material.Ms = 8e5
material.alpha = 1
field.extern = 5e4, 0, 0
init.direction = 0, 1, 0
stepper.dt = 5e-14
stepper.torque_tol = 1
output.sample_every = 200
";

fn main() -> micromag::Result<()> {
    let parsed = parse_config(CONFIG)?;
    for d in &parsed.defaults_applied {
        println!("default: {d}");
    }
    let spec = parsed.spec;
    let mut field = spec.field_provider(spec.make_backend()?)?;
    let out = micromag::relax(spec.initial_state()?, &mut field, spec.stepper)?;
    print!("{}", format_trajectory_csv(&out.log));
    println!("converged: {}", out.converged);
    Ok(())
}
