//! Runs the built-in consistency checks and prints one line per check.

use micromag::selftest::{run_selftest, SelftestOptions};

fn main() {
    let results = run_selftest(SelftestOptions::default());
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", results.len());
}
