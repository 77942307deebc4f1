//! Compares the FFT demag field against the brute-force direct sum for a
//! random magnetization, in both precisions.

use micromag::oracle::direct_demag;
use micromag::selftest::relative_linf;
use micromag::{make_random_state, Backend, Demag, Grid, Precision};

fn main() -> micromag::Result<()> {
    let grid = Grid::new([7, 5, 3], [3e-9, 4e-9, 5e-9])?;
    let state = make_random_state(grid, 8e5, 42)?;
    let reference = direct_demag(&state.m, &grid)?;
    for precision in [Precision::F64, Precision::F32] {
        let mut demag = Demag::new(&grid, precision, &Backend::serial())?;
        let h = demag.field(&state.m)?;
        println!(
            "{precision:?}: relative L-inf error {:.3e}",
            relative_linf(&h, &reference)
        );
    }
    Ok(())
}
