//! Average demagnetizing factors of uniformly magnetized prisms.
//!
//! A cube should give 1/3 along every axis; a flat plate approaches 1 along
//! its thin axis.

use micromag::{make_uniform_state, Backend, Demag, Grid, Precision};

fn average_factor(grid: Grid, axis: usize) -> micromag::Result<f64> {
    let ms = 8e5;
    let mut dir = [0.0; 3];
    dir[axis] = 1.0;
    let state = make_uniform_state(grid, dir, ms)?;
    let mut demag = Demag::new(&grid, Precision::F64, &Backend::serial())?;
    let h = demag.field(&state.m)?;
    let mean = h.component(axis).iter().sum::<f64>() / grid.cell_count() as f64;
    Ok(-mean / ms)
}

fn main() -> micromag::Result<()> {
    let shapes = [
        ("cube 8x8x8", Grid::cubic([8, 8, 8], 2e-9)?),
        ("bar 16x4x4", Grid::cubic([16, 4, 4], 2e-9)?),
        ("plate 32x32x1", Grid::cubic([32, 32, 1], 2e-9)?),
    ];
    println!(
        "{:14} {:>8} {:>8} {:>8} {:>8}",
        "shape", "Nxx", "Nyy", "Nzz", "trace"
    );
    for (name, grid) in shapes {
        let n: Vec<f64> = (0..3)
            .map(|a| average_factor(grid, a))
            .collect::<Result<_, _>>()?;
        println!(
            "{name:14} {:8.5} {:8.5} {:8.5} {:8.5}",
            n[0],
            n[1],
            n[2],
            n.iter().sum::<f64>()
        );
    }
    Ok(())
}
