//! Plain-text problem description: one `key = value` per line, `#` comments.
//!
//! ```text
//! grid.nx = 16
//! grid.ny = 16
//! grid.nz = 16
//! grid.dx = 2.8e-9
//! grid.dy = 2.8e-9
//! grid.dz = 2.8e-9
//! material.Ms = 8e5
//! material.A = 1.3e-11
//! field.extern = 0, 0, 0
//! init.kind = vortex
//! init.direction = +x
//! ```
//!
//! Only `grid.*` and `material.Ms` are required. Unknown keys, repeated keys
//! and malformed values are errors that name the line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::backend::{Backend, BackendKind};
use crate::dynamics::StepperConfig;
use crate::error::{Error, Result};
use crate::fft::Precision;
use crate::fields::{EffectiveField, ExternalField, TermSet};
use crate::grid::Grid;
use crate::material::MaterialParams;
use crate::state::{make_uniform_state, make_vortex_state, CoreAxis, SimState};
use crate::vec3::{norm, Vec3};

/// Initial magnetization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitKind {
    Uniform(Vec3),
    Vortex(CoreAxis),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub csv: PathBuf,
    pub dump: PathBuf,
}

/// Everything needed to set up and run one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub grid: Grid,
    pub material: MaterialParams,
    pub terms: TermSet,
    /// Applied field, A/m.
    pub external: Vec3,
    pub init: InitKind,
    pub stepper: StepperConfig,
    pub backend: BackendKind,
    /// Worker threads for the parallel backend (0: hardware concurrency).
    pub threads: usize,
    pub precision: Precision,
    pub output: OutputSpec,
}

/// A parsed spec plus the defaults that were filled in, as `key = value` strings.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub spec: SimSpec,
    pub defaults_applied: Vec<String>,
}

const REQUIRED: [&str; 7] = [
    "grid.nx",
    "grid.ny",
    "grid.nz",
    "grid.dx",
    "grid.dy",
    "grid.dz",
    "material.Ms",
];

/// Optional keys with their defaults, in output order.
const OPTIONAL: [(&str, &str); 17] = [
    ("material.A", "1.3e-11"),
    ("material.Ku", "0"),
    ("material.alpha", "0.5"),
    ("material.gamma", "176085963000"),
    ("material.easy_axis", "0, 0, 1"),
    ("field.extern", "0, 0, 0"),
    ("field.terms", "exchange, anisotropy, demag, zeeman"),
    ("init.kind", "uniform"),
    ("init.direction", "0, 0, 1"),
    ("stepper.dt", "1e-14"),
    ("stepper.max_steps", "1000000"),
    ("stepper.torque_tol", "0.01"),
    ("stepper.renormalize_every", "1"),
    ("backend.kind", "serial"),
    ("backend.threads", "0"),
    ("precision", "f64"),
    ("output.sample_every", "100"),
];

const OUTPUT_DEFAULTS: [(&str, &str); 2] = [
    ("output.csv", "trajectory.csv"),
    ("output.dump", "final.dump"),
];

fn known(key: &str) -> bool {
    REQUIRED.contains(&key)
        || OPTIONAL.iter().any(|(k, _)| *k == key)
        || OUTPUT_DEFAULTS.iter().any(|(k, _)| *k == key)
}

struct Entries {
    values: BTreeMap<String, (usize, String)>,
    defaults: Vec<String>,
}

impl Entries {
    fn line_err(&self, key: &str, message: impl Into<String>) -> Error {
        let line = self.values.get(key).map_or(0, |(l, _)| *l);
        Error::ConfigLine {
            line,
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn raw(&mut self, key: &str) -> Result<String> {
        if let Some((_, v)) = self.values.get(key) {
            return Ok(v.clone());
        }
        if let Some((_, d)) = OPTIONAL
            .iter()
            .chain(OUTPUT_DEFAULTS.iter())
            .find(|(k, _)| *k == key)
        {
            self.defaults.push(format!("{key} = {d}"));
            return Ok(d.to_string());
        }
        Err(Error::ConfigMissing {
            key: key.to_string(),
        })
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(key)?;
        raw.parse::<T>()
            .map_err(|e| self.line_err(key, format!("cannot parse {raw:?}: {e}")))
    }

    fn float(&mut self, key: &str) -> Result<f64> {
        let v: f64 = self.parse(key)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.line_err(key, "value must be finite"))
        }
    }

    fn positive_count(&mut self, key: &str) -> Result<usize> {
        let raw = self.raw(key)?;
        match raw.parse::<i64>() {
            Ok(v) if v >= 1 => Ok(v as usize),
            Ok(v) => Err(self.line_err(key, format!("must be >= 1, got {v}"))),
            Err(e) => Err(self.line_err(key, format!("cannot parse {raw:?}: {e}"))),
        }
    }

    fn vector(&mut self, key: &str) -> Result<Vec3> {
        let raw = self.raw(key)?;
        parse_vec3(&raw).map_err(|m| self.line_err(key, m))
    }

    /// Runs a validation closure and attributes its failure to `key`.
    fn check<T>(&self, key: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| self.line_err(key, e.to_string()))
    }
}

fn parse_vec3(raw: &str) -> std::result::Result<Vec3, String> {
    let trimmed = raw.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!(
            "expected three comma-separated numbers, got {raw:?}"
        ));
    }
    let mut v = [0.0; 3];
    for (dst, p) in v.iter_mut().zip(&parts) {
        *dst = p
            .parse::<f64>()
            .map_err(|e| format!("cannot parse {p:?}: {e}"))?;
        if !dst.is_finite() {
            return Err(format!("non-finite component {p:?}"));
        }
    }
    Ok(v)
}

fn parse_terms(raw: &str) -> std::result::Result<TermSet, String> {
    let mut set = TermSet::NONE;
    for name in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "exchange" => set.exchange = true,
            "anisotropy" => set.anisotropy = true,
            "demag" => set.demag = true,
            "zeeman" => set.zeeman = true,
            "none" => {}
            other => return Err(format!("unknown field term {other:?}")),
        }
    }
    Ok(set)
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let mut values = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::ConfigLine {
                line,
                key: content.to_string(),
                message: "expected `key = value`".into(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if !known(key) {
            return Err(Error::ConfigLine {
                line,
                key: key.to_string(),
                message: "unknown key".into(),
            });
        }
        if values
            .insert(key.to_string(), (line, value.to_string()))
            .is_some()
        {
            return Err(Error::ConfigLine {
                line,
                key: key.to_string(),
                message: "key given more than once".into(),
            });
        }
    }
    let mut e = Entries {
        values,
        defaults: Vec::new(),
    };
    for key in REQUIRED {
        if !e.values.contains_key(key) {
            return Err(Error::ConfigMissing {
                key: key.to_string(),
            });
        }
    }

    let n = [
        e.positive_count("grid.nx")?,
        e.positive_count("grid.ny")?,
        e.positive_count("grid.nz")?,
    ];
    let mut cell = [0.0; 3];
    for (c, key) in cell.iter_mut().zip(["grid.dx", "grid.dy", "grid.dz"]) {
        *c = e.float(key)?;
        if *c <= 0.0 {
            return Err(e.line_err(key, "cell size must be > 0"));
        }
    }
    let grid = Grid::new(n, cell)?;

    let ms = e.float("material.Ms")?;
    let a_ex = e.float("material.A")?;
    let ku = e.float("material.Ku")?;
    let alpha = e.float("material.alpha")?;
    let gamma = e.float("material.gamma")?;
    let easy_axis = e.vector("material.easy_axis")?;
    let material = MaterialParams {
        a_ex,
        ku,
        ms,
        alpha,
        gamma,
        easy_axis,
    };
    for (key, bad) in [
        ("material.Ms", ms <= 0.0),
        ("material.A", a_ex < 0.0),
        ("material.alpha", alpha < 0.0),
        ("material.gamma", gamma <= 0.0),
        ("material.easy_axis", (norm(easy_axis) - 1.0).abs() > 1e-12),
    ] {
        if bad {
            return Err(e.check(key, material.validate()).unwrap_err());
        }
    }

    let external = e.vector("field.extern")?;
    let raw_terms = e.raw("field.terms")?;
    let terms = parse_terms(&raw_terms).map_err(|m| e.line_err("field.terms", m))?;

    let kind = e.raw("init.kind")?;
    let init = match kind.as_str() {
        "uniform" => {
            let d = e.vector("init.direction")?;
            if (norm(d) - 1.0).abs() > 1e-9 {
                return Err(e.line_err("init.direction", "uniform direction must be a unit vector"));
            }
            InitKind::Uniform(d)
        }
        "vortex" => {
            let raw = e.raw("init.direction")?;
            let axis = e.check("init.direction", raw.parse::<CoreAxis>())?;
            InitKind::Vortex(axis)
        }
        other => {
            return Err(e.line_err(
                "init.kind",
                format!("expected uniform or vortex, got {other:?}"),
            ))
        }
    };

    let stepper = StepperConfig {
        dt: e.float("stepper.dt")?,
        max_steps: e.parse("stepper.max_steps")?,
        torque_tol: e.float("stepper.torque_tol")?,
        renormalize_every: e.parse("stepper.renormalize_every")?,
        sample_every: e.parse("output.sample_every")?,
    };
    if let Err(err) = stepper.validate() {
        let key = if stepper.dt <= 0.0 {
            "stepper.dt"
        } else if stepper.renormalize_every == 0 {
            "stepper.renormalize_every"
        } else {
            "stepper.torque_tol"
        };
        return Err(e.line_err(key, err.to_string()));
    }

    let raw = e.raw("backend.kind")?;
    let backend = e.check("backend.kind", raw.parse::<BackendKind>())?;
    let threads = e.parse("backend.threads")?;
    let raw = e.raw("precision")?;
    let precision = e.check("precision", raw.parse::<Precision>())?;
    let output = OutputSpec {
        csv: PathBuf::from(e.raw("output.csv")?),
        dump: PathBuf::from(e.raw("output.dump")?),
    };

    Ok(ParsedConfig {
        spec: SimSpec {
            grid,
            material,
            terms,
            external,
            init,
            stepper,
            backend,
            threads,
            precision,
            output,
        },
        defaults_applied: e.defaults,
    })
}

fn fmt_vec(v: Vec3) -> String {
    format!("{:?}, {:?}, {:?}", v[0], v[1], v[2])
}

impl SimSpec {
    /// Every key, one per line, in a form [`parse_config`] reads back to an equal spec.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let g = &self.grid;
        let m = &self.material;
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("grid.nx", g.nx.to_string());
        kv("grid.ny", g.ny.to_string());
        kv("grid.nz", g.nz.to_string());
        kv("grid.dx", format!("{:?}", g.dx));
        kv("grid.dy", format!("{:?}", g.dy));
        kv("grid.dz", format!("{:?}", g.dz));
        kv("material.Ms", format!("{:?}", m.ms));
        kv("material.A", format!("{:?}", m.a_ex));
        kv("material.Ku", format!("{:?}", m.ku));
        kv("material.alpha", format!("{:?}", m.alpha));
        kv("material.gamma", format!("{:?}", m.gamma));
        kv("material.easy_axis", fmt_vec(m.easy_axis));
        kv("field.extern", fmt_vec(self.external));
        let names = self.terms.names();
        kv(
            "field.terms",
            if names.is_empty() {
                "none".into()
            } else {
                names.join(", ")
            },
        );
        match self.init {
            InitKind::Uniform(d) => {
                kv("init.kind", "uniform".into());
                kv("init.direction", fmt_vec(d));
            }
            InitKind::Vortex(a) => {
                kv("init.kind", "vortex".into());
                kv("init.direction", a.to_string());
            }
        }
        kv("stepper.dt", format!("{:?}", self.stepper.dt));
        kv("stepper.max_steps", self.stepper.max_steps.to_string());
        kv(
            "stepper.torque_tol",
            format!("{:?}", self.stepper.torque_tol),
        );
        kv(
            "stepper.renormalize_every",
            self.stepper.renormalize_every.to_string(),
        );
        kv("backend.kind", self.backend.to_string());
        kv("backend.threads", self.threads.to_string());
        kv("precision", self.precision.to_string());
        kv("output.csv", self.output.csv.display().to_string());
        kv("output.dump", self.output.dump.display().to_string());
        kv("output.sample_every", self.stepper.sample_every.to_string());
        s
    }

    pub fn make_backend(&self) -> Result<Backend> {
        Backend::new(self.backend, self.threads)
    }

    pub fn initial_state(&self) -> Result<SimState> {
        match self.init {
            InitKind::Uniform(d) => make_uniform_state(self.grid, d, self.material.ms),
            InitKind::Vortex(axis) => make_vortex_state(self.grid, axis, self.material.ms),
        }
    }

    pub fn field_provider(&self, backend: Backend) -> Result<EffectiveField> {
        EffectiveField::new(
            self.grid,
            self.material,
            self.terms,
            ExternalField::Uniform(self.external),
            self.precision,
            backend,
        )
    }

    /// Spec with defaults for everything except the grid and Ms.
    pub fn with_defaults(grid: Grid, ms: f64) -> Self {
        let text = format!(
            "grid.nx = {}\ngrid.ny = {}\ngrid.nz = {}\ngrid.dx = {:?}\ngrid.dy = {:?}\ngrid.dz = {:?}\nmaterial.Ms = {:?}\n",
            grid.nx, grid.ny, grid.nz, grid.dx, grid.dy, grid.dz, ms
        );
        parse_config(&text).expect("defaults are valid").spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::DEFAULT_GAMMA;

    const MINIMAL: &str = "\
# cube
grid.nx = 4
grid.ny = 4
grid.nz = 2
grid.dx = 5e-9
grid.dy = 5e-9
grid.dz = 5e-9   # cubic cells
material.Ms = 8e5
";

    #[test]
    fn minimal_config_gets_defaults() {
        let p = parse_config(MINIMAL).unwrap();
        let s = &p.spec;
        assert_eq!(s.grid.dims(), [4, 4, 2]);
        assert_eq!(s.material.ms, 8e5);
        assert_eq!(s.material.a_ex, 1.3e-11);
        assert_eq!(s.material.gamma, DEFAULT_GAMMA);
        assert_eq!(s.terms, TermSet::ALL);
        assert_eq!(s.init, InitKind::Uniform([0.0, 0.0, 1.0]));
        assert_eq!(s.stepper, StepperConfig::default());
        assert_eq!(s.backend, BackendKind::Serial);
        assert_eq!(s.precision, Precision::F64);
        assert_eq!(
            p.defaults_applied.len(),
            OPTIONAL.len() + OUTPUT_DEFAULTS.len()
        );
        assert!(p
            .defaults_applied
            .iter()
            .any(|d| d == "material.A = 1.3e-11"));
    }

    #[test]
    fn negative_count_names_key() {
        let text = MINIMAL.replace("grid.nx = 4", "grid.nx = -4");
        match parse_config(&text).unwrap_err() {
            Error::ConfigLine { line, key, .. } => {
                assert_eq!(key, "grid.nx");
                assert_eq!(line, 2);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unknown_and_missing_keys() {
        let text = format!("{MINIMAL}material.Kc = 1\n");
        assert!(matches!(
            parse_config(&text),
            Err(Error::ConfigLine { line: 9, .. })
        ));
        let text = MINIMAL.replace("material.Ms = 8e5", "");
        assert!(
            matches!(parse_config(&text), Err(Error::ConfigMissing { key }) if key == "material.Ms")
        );
        let text = format!("{MINIMAL}grid.nx = 5\n");
        assert!(parse_config(&text).is_err());
        let text = format!("{MINIMAL}precision\n");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn malformed_values() {
        for (from, to, key) in [
            ("grid.dx = 5e-9", "grid.dx = five", "grid.dx"),
            ("material.Ms = 8e5", "material.Ms = -1", "material.Ms"),
        ] {
            match parse_config(&MINIMAL.replace(from, to)).unwrap_err() {
                Error::ConfigLine { key: k, .. } => assert_eq!(k, key),
                e => panic!("{e}"),
            }
        }
        let bad_axis = format!("{MINIMAL}material.easy_axis = 1, 1, 0\n");
        assert!(
            matches!(parse_config(&bad_axis), Err(Error::ConfigLine { key, .. }) if key == "material.easy_axis")
        );
        let bad_init = format!("{MINIMAL}init.kind = vortex\ninit.direction = q\n");
        assert!(parse_config(&bad_init).is_err());
    }

    const SP3: &str = "\
grid.nx = 16
grid.ny = 16
grid.nz = 16
grid.dx = 2.8e-9
grid.dy = 2.8e-9
grid.dz = 2.8e-9
material.Ms = 800000
material.A = 1.3e-11
material.Ku = 40212.385965949352
material.alpha = 1
material.easy_axis = 0, 0, 1
field.extern = 0, 0, 0
field.terms = exchange, anisotropy, demag
init.kind = vortex
init.direction = +x
stepper.dt = 5e-14
stepper.max_steps = 200000
stepper.torque_tol = 0.05
backend.kind = parallel
backend.threads = 2
precision = f32
output.csv = sp3.csv
output.dump = sp3.dump
output.sample_every = 500
";

    #[test]
    fn full_config_matches_keys() {
        let p = parse_config(SP3).unwrap();
        let s = p.spec;
        assert_eq!(s.material.ku, 40212.385965949352);
        assert_eq!(s.material.alpha, 1.0);
        assert_eq!(
            s.terms,
            TermSet {
                zeeman: false,
                ..TermSet::ALL
            }
        );
        assert_eq!(s.init, InitKind::Vortex(CoreAxis::PlusX));
        assert_eq!(s.stepper.dt, 5e-14);
        assert_eq!(s.stepper.max_steps, 200000);
        assert_eq!(s.stepper.sample_every, 500);
        assert_eq!(s.backend, BackendKind::Parallel);
        assert_eq!(s.threads, 2);
        assert_eq!(s.precision, Precision::F32);
        assert_eq!(s.output.csv, PathBuf::from("sp3.csv"));
        assert_eq!(
            p.defaults_applied,
            vec![
                "material.gamma = 176085963000",
                "stepper.renormalize_every = 1"
            ]
        );
    }

    #[test]
    fn format_parse_fixpoint() {
        for text in [MINIMAL, SP3] {
            let a = parse_config(text).unwrap().spec;
            let formatted = a.to_config_string();
            let b = parse_config(&formatted).unwrap();
            assert_eq!(a, b.spec);
            assert!(b.defaults_applied.is_empty());
            assert_eq!(formatted, b.spec.to_config_string());
        }
    }
}
