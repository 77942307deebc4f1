//! Command-line front end: `relax`, `run`, `bench` and `selftest`.
//!
//! Exit codes: 0 success, 1 error, 2 relaxation not converged.
//! Relative output paths in a config file are resolved against the
//! directory holding that file.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::backend::{bench_steps, Backend, BackendKind, StepTiming, WallClock, BENCH_SAMPLES};
use crate::config::{parse_config, SimSpec};
use crate::dump::write_field_dump;
use crate::dynamics::{relax, run, RunOutcome, Sample, Stepper};
use crate::error::{Error, Result};
use crate::fft::Precision;
use crate::grid::Grid;
use crate::selftest::{run_selftest, SelftestOptions};
use crate::state::{make_random_state, reduced_mean};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNCONVERGED: i32 = 2;

pub const DEFAULT_BENCH_SIZES: [usize; 4] = [8, 16, 32, 64];

#[derive(Debug, Parser)]
#[command(
    name = "micromag",
    version,
    about = "Finite-difference LLG micromagnetic solver"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relax to equilibrium; writes the trajectory CSV and final dump.
    Relax {
        #[arg(long)]
        config: PathBuf,
    },
    /// Integrate a fixed number of steps.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        steps: u64,
    },
    /// Per-step timing over cubic problem sizes.
    Bench {
        /// Comma-separated cube edges in cells.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BENCH_SIZES)]
        sizes: Vec<usize>,
        /// Also run 128³.
        #[arg(long)]
        large: bool,
        /// Template for material, cell size, backend and precision.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "bench.csv")]
        csv: PathBuf,
        #[arg(long, default_value_t = BENCH_SAMPLES)]
        samples: usize,
    },
    /// Oracle equivalence, tensor identities and gradient checks.
    Selftest {
        #[arg(long, default_value = "f64")]
        precision: Precision,
        #[arg(long, hide = true)]
        tamper_tensor_sign: bool,
    },
}

/// Entry point for the binary.
pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Relax { config } => cmd_simulate(&config, None, out),
        Command::Run { config, steps } => cmd_simulate(&config, Some(steps), out),
        Command::Bench {
            mut sizes,
            large,
            config,
            csv,
            samples,
        } => {
            if large && !sizes.contains(&128) {
                sizes.push(128);
            }
            let template = match config {
                Some(path) => Some(load_config(&path, out)?),
                None => None,
            };
            cmd_bench(&sizes, template.as_ref(), &csv, samples, out, err)
        }
        Command::Selftest {
            precision,
            tamper_tensor_sign,
        } => {
            let results = run_selftest(SelftestOptions {
                precision,
                tamper_tensor_sign,
            });
            for r in &results {
                writeln!(out, "{r}")?;
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            writeln!(out, "{} checks, {failed} failed", results.len())?;
            Ok(if failed == 0 { EXIT_OK } else { EXIT_ERROR })
        }
    }
}

/// Reads and parses a config, echoing applied defaults, with relative
/// output paths rebased onto the config's directory.
pub fn load_config(path: &Path, out: &mut dyn Write) -> Result<SimSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let parsed = parse_config(&text)?;
    for d in &parsed.defaults_applied {
        writeln!(out, "default: {d}")?;
    }
    let mut spec = parsed.spec;
    let base = path.parent().unwrap_or(Path::new(""));
    for p in [&mut spec.output.csv, &mut spec.output.dump] {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(spec)
}

fn cmd_simulate(config: &Path, steps: Option<u64>, out: &mut dyn Write) -> Result<i32> {
    let spec = load_config(config, out)?;
    let backend = spec.make_backend()?;
    let mut provider = spec.field_provider(backend)?;
    let state = spec.initial_state()?;
    let outcome = match steps {
        None => relax(state, &mut provider, spec.stepper)?,
        Some(n) => run(state, &mut provider, spec.stepper, n)?,
    };
    write_outputs(&spec, &outcome)?;
    report(&spec, &outcome, out)?;
    Ok(match (steps, outcome.converged) {
        (None, false) => {
            writeln!(out, "not converged after {} steps", outcome.state.step)?;
            EXIT_UNCONVERGED
        }
        _ => EXIT_OK,
    })
}

fn write_outputs(spec: &SimSpec, outcome: &RunOutcome) -> Result<()> {
    fs::write(&spec.output.csv, format_trajectory_csv(&outcome.log))?;
    write_field_dump(
        &spec.output.dump,
        &outcome.state.m,
        spec.material.ms,
        spec.precision,
    )
}

fn report(spec: &SimSpec, outcome: &RunOutcome, out: &mut dyn Write) -> Result<()> {
    let last = outcome.log.last();
    let m = reduced_mean(&outcome.state, spec.material.ms);
    writeln!(
        out,
        "steps: {}  t: {:e} s  converged: {}",
        outcome.state.step, outcome.state.t, outcome.converged
    )?;
    if let Some(s) = last {
        let e = s.energy;
        writeln!(
            out,
            "energy (J): exchange {:e}  anisotropy {:e}  demag {:e}  zeeman {:e}  total {:e}",
            e.exchange, e.anisotropy, e.demag, e.zeeman, e.total
        )?;
        writeln!(out, "max torque: {:e} deg/ns", s.max_torque)?;
    }
    writeln!(out, "mean m: {:.9} {:.9} {:.9}", m[0], m[1], m[2])?;
    writeln!(
        out,
        "wrote {} and {}",
        spec.output.csv.display(),
        spec.output.dump.display()
    )?;
    Ok(())
}

pub const TRAJECTORY_HEADER: &str =
    "step,t_s,mx,my,mz,E_exch_J,E_anis_J,E_demag_J,E_zeeman_J,E_total_J,max_torque_deg_per_ns";

pub fn format_trajectory_csv(log: &[Sample]) -> String {
    let mut s = String::from(TRAJECTORY_HEADER);
    s.push('\n');
    for r in log {
        let e = r.energy;
        let _ = writeln!(
            s,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.step,
            r.t,
            r.m_mean[0],
            r.m_mean[1],
            r.m_mean[2],
            e.exchange,
            e.anisotropy,
            e.demag,
            e.zeeman,
            e.total,
            r.max_torque
        );
    }
    s
}

/// One row of the benchmark table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub timing: StepTiming,
}

pub const BENCH_HEADER: &str =
    "n,cells,ms_per_step,pad_ms,forward_fft_ms,spectral_multiply_ms,inverse_fft_ms,local_fields_ms,integrate_ms";

pub fn format_bench_csv(rows: &[BenchRow]) -> String {
    let mut s = String::from(BENCH_HEADER);
    s.push('\n');
    for r in rows {
        let t = r.timing;
        let _ = writeln!(
            s,
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.n,
            r.n.pow(3),
            t.total * 1e3,
            t.pad * 1e3,
            t.forward_fft * 1e3,
            t.spectral_multiply * 1e3,
            t.inverse_fft * 1e3,
            t.local_fields * 1e3,
            t.integrate * 1e3
        );
    }
    s
}

/// Rough working-set size of an `n³` problem in bytes.
fn footprint(n: usize) -> usize {
    let cells = n.pow(3);
    let padded = (2 * n).next_power_of_two().max(2).pow(3);
    // m, h_eff, next step and four term fields; six tensor spectra plus three work buffers.
    cells * 7 * 3 * 8 + padded * 9 * 16
}

fn memory_available(bytes: usize) -> bool {
    let mut probe: Vec<u8> = Vec::new();
    probe.try_reserve_exact(bytes).is_ok()
}

/// Per-step timing of an `n³` problem built from `template`.
pub fn bench_size(template: &SimSpec, n: usize, samples: usize) -> Result<StepTiming> {
    let grid = Grid::new([n, n, n], template.grid.cell_size())?;
    let spec = SimSpec {
        grid,
        ..template.clone()
    };
    let mut provider = spec.field_provider(spec.make_backend()?)?;
    let mut state = make_random_state(grid, spec.material.ms, 1)?;
    let mut stepper = Stepper::new(grid, spec.stepper)?;
    let clock = WallClock::default();
    bench_steps(&clock, samples, |timer| {
        stepper.step_timed(&mut state, &mut provider, timer)
    })
}

/// Template used when `bench` gets no config: permalloy, 5 nm cells, parallel backend.
pub fn default_bench_template() -> SimSpec {
    let mut spec = SimSpec::with_defaults(Grid::cubic([1, 1, 1], 5e-9).expect("valid"), 8e5);
    spec.backend = BackendKind::Parallel;
    spec
}

fn cmd_bench(
    sizes: &[usize],
    template: Option<&SimSpec>,
    csv: &Path,
    samples: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let fallback = default_bench_template();
    let template = template.unwrap_or(&fallback);
    let threads = Backend::new(template.backend, template.threads)?.threads();
    writeln!(
        out,
        "backend {} ({} threads), precision {}, {} samples after {} warm-up",
        template.backend,
        threads,
        template.precision,
        samples,
        crate::backend::BENCH_WARMUP
    )?;
    writeln!(
        out,
        "{:>5} {:>9} {:>10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "N", "cells", "ms/step", "pad", "fwd", "mult", "inv", "local", "integ"
    )?;
    let mut rows = Vec::new();
    for &n in sizes {
        if n == 0 {
            writeln!(err, "warning: skipping size 0")?;
            continue;
        }
        if !memory_available(footprint(n)) {
            writeln!(
                err,
                "warning: skipping {n}^3, cannot allocate {} bytes",
                footprint(n)
            )?;
            continue;
        }
        let timing = match bench_size(template, n, samples) {
            Ok(t) => t,
            Err(e) => {
                writeln!(err, "warning: skipping {n}^3: {e}")?;
                continue;
            }
        };
        let ms = |s: f64| s * 1e3;
        writeln!(
            out,
            "{:>5} {:>9} {:>10.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            n,
            n.pow(3),
            ms(timing.total),
            ms(timing.pad),
            ms(timing.forward_fft),
            ms(timing.spectral_multiply),
            ms(timing.inverse_fft),
            ms(timing.local_fields),
            ms(timing.integrate)
        )?;
        rows.push(BenchRow { n, timing });
    }
    if rows.is_empty() {
        writeln!(err, "error: no size could be benchmarked")?;
        return Ok(EXIT_ERROR);
    }
    fs::write(csv, format_bench_csv(&rows))?;
    writeln!(out, "wrote {}", csv.display())?;
    Ok(EXIT_OK)
}
