use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use micromag::dump::read_field_dump;

fn micromag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_micromag"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SINGLE_CELL: &str = "\
grid.nx = 1
grid.ny = 1
grid.nz = 1
grid.dx = 4e-9
grid.dy = 4e-9
grid.dz = 4e-9
material.Ms = 8e5
material.alpha = 1
field.extern = 1e5, 0, 0
init.direction = 0, 0, 1
stepper.dt = 1e-13
output.sample_every = 50
";

#[test]
fn single_cell_relaxes_along_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cell.cfg", SINGLE_CELL);
    let out = micromag(&["relax", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("default: material.A = 1.3e-11"), "{text}");
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "step,t_s,mx,my,mz,E_exch_J,E_anis_J,E_demag_J,E_zeeman_J,E_total_J,max_torque_deg_per_ns"
    );
    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(last.len(), 11);
    assert!(last[2] > 1.0 - 1e-9, "mx = {}", last[2]);
    assert!(last[10] <= 0.01);
    let dump = read_field_dump(&dir.path().join("final.dump")).unwrap();
    assert_eq!(dump.m.len(), 1);
    assert!(dump.m.x[0] > 8e5 * (1.0 - 1e-9));
}

#[test]
fn max_steps_reached_exits_two_with_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let body =
        format!("{SINGLE_CELL}stepper.max_steps = 1\noutput.csv = t.csv\noutput.dump = f.dump\n");
    let cfg = write_config(dir.path(), "short.cfg", &body);
    let out = micromag(&["relax", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let csv = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3, "header, step 0 and step 1");
    assert!(dir.path().join("f.dump").exists());
}

#[test]
fn bad_config_exits_one_naming_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.cfg",
        &SINGLE_CELL.replace("grid.nx = 1", "grid.nx = -4"),
    );
    let out = micromag(&["relax", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1") && err.contains("grid.nx"), "{err}");

    let cfg = write_config(
        dir.path(),
        "unknown.cfg",
        &format!("{SINGLE_CELL}stepper.order = 4\n"),
    );
    let out = micromag(&["run", "--config", &cfg, "--steps", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stepper.order"));
}

#[test]
fn run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let body = "\
grid.nx = 6
grid.ny = 5
grid.nz = 2
grid.dx = 3e-9
grid.dy = 3e-9
grid.dz = 3e-9
material.Ms = 8e5
material.Ku = 5e4
material.easy_axis = 1, 0, 0
init.kind = vortex
init.direction = -z
output.sample_every = 10
";
    let cfg = write_config(dir.path(), "v.cfg", body);
    let first = micromag(&["run", "--config", &cfg, "--steps", "40"]);
    assert_eq!(first.status.code(), Some(0), "{}", stdout(&first));
    let csv1 = fs::read(dir.path().join("trajectory.csv")).unwrap();
    let dump1 = fs::read(dir.path().join("final.dump")).unwrap();
    let second = micromag(&["run", "--config", &cfg, "--steps", "40"]);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(csv1, fs::read(dir.path().join("trajectory.csv")).unwrap());
    assert_eq!(dump1, fs::read(dir.path().join("final.dump")).unwrap());
    let text = String::from_utf8(csv1).unwrap();
    assert_eq!(text.lines().count(), 1 + 5);
    assert!(text.lines().last().unwrap().starts_with("40,"));
}

#[test]
fn selftest_passes_and_detects_tampering() {
    let out = micromag(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("0 failed"));
    let out = micromag(&["selftest", "--precision", "f32"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("tolerance 1e-3"));
    let out = micromag(&["selftest", "--tamper-tensor-sign"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL self-term trace"));
}

#[test]
fn bench_writes_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let out = micromag(&[
        "bench",
        "--sizes",
        "4,8",
        "--samples",
        "3",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<String> = fs::read_to_string(&csv)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("4,64,") && rows[2].starts_with("8,512,"));
    let out = micromag(&["bench", "--sizes", "0", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sp3_small_cube_flower_beats_vortex() {
    // Coarse 8³ version of the crossover experiment, driven through config files.
    let dir = tempfile::tempdir().unwrap();
    let cell = 8.0 * micromag::sp3::sp3_material(1.0).exchange_length() / 8.0;
    let ku = micromag::sp3::sp3_material(1.0).ku;
    let mut energies = Vec::new();
    for (name, init) in [
        ("flower", "init.kind = uniform\ninit.direction = 0, 0, 1"),
        ("vortex", "init.kind = vortex\ninit.direction = +x"),
    ] {
        let body = format!(
            "grid.nx = 8\ngrid.ny = 8\ngrid.nz = 8\ngrid.dx = {cell:?}\ngrid.dy = {cell:?}\ngrid.dz = {cell:?}\n\
             material.Ms = 8e5\nmaterial.Ku = {ku:?}\nmaterial.alpha = 1\nfield.terms = exchange, anisotropy, demag\n\
             {init}\nstepper.dt = 1e-13\nstepper.torque_tol = 0.05\noutput.csv = {name}.csv\noutput.dump = {name}.dump\n"
        );
        let cfg = write_config(dir.path(), &format!("{name}.cfg"), &body);
        let out = micromag(&["relax", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        let csv = fs::read_to_string(dir.path().join(format!("{name}.csv"))).unwrap();
        let last = csv.lines().last().unwrap().to_owned();
        energies.push(last.split(',').nth(9).unwrap().parse::<f64>().unwrap());
    }
    assert!(energies[0] < energies[1], "{energies:?}");
}
