//! Relaxes a small vortex, writes the final state as a field dump and reads it
//! back.

use micromag::dump::{read_field_dump, write_field_dump};
use micromag::state::CoreAxis;
use micromag::{Grid, InitKind, MaterialParams, SimSpec};

fn main() -> micromag::Result<()> {
    let grid = Grid::cubic([10, 10, 4], 5e-9)?;
    let mut spec = SimSpec::with_defaults(grid, 8e5);
    spec.material = MaterialParams {
        alpha: 1.0,
        ..MaterialParams::permalloy()
    };
    spec.init = InitKind::Vortex(CoreAxis::PlusZ);
    spec.stepper.dt = 5e-14;
    spec.stepper.torque_tol = 1.0;

    let backend = spec.make_backend()?;
    let mut field = spec.field_provider(backend)?;
    let out = micromag::relax(spec.initial_state()?, &mut field, spec.stepper)?;
    println!(
        "relaxed: converged {} after {} steps",
        out.converged, out.state.step
    );

    let path = std::env::temp_dir().join("micromag_example.dump");
    write_field_dump(&path, &out.state.m, spec.material.ms, spec.precision)?;
    let back = read_field_dump(&path)?;
    println!(
        "{} cells written to {}, read back identical: {}",
        back.grid.cell_count(),
        path.display(),
        back.m == out.state.m
    );
    Ok(())
}
