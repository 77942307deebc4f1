//! Text dump of a magnetization field.
//!
//! ```text
//! # nx = 2
//! # ny = 1
//! # nz = 1
//! # dx = 5e-9
//! # dy = 5e-9
//! # dz = 5e-9
//! # Ms = 800000
//! # precision = f64
//! 0 0 0 0.0000000000000000e0 0.0000000000000000e0 8.0000000000000000e5
//! 1 0 0 ...
//! ```
//!
//! Components are in A/m with 17 significant digits, so f64 values survive a
//! write/read cycle bitwise. Cells are listed with `i` varying fastest.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fft::Precision;
use crate::grid::Grid;
use crate::vector_field::VectorField;

/// Contents of a field dump.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub grid: Grid,
    pub ms: f64,
    pub precision: Precision,
    pub m: VectorField,
}

const HEADER_KEYS: [&str; 8] = ["nx", "ny", "nz", "dx", "dy", "dz", "Ms", "precision"];

pub fn format_field_dump(m: &VectorField, ms: f64, precision: Precision) -> String {
    let g = m.grid();
    let mut s = String::with_capacity(200 + 90 * m.len());
    let _ = writeln!(s, "# nx = {}\n# ny = {}\n# nz = {}", g.nx, g.ny, g.nz);
    let _ = writeln!(s, "# dx = {:?}\n# dy = {:?}\n# dz = {:?}", g.dx, g.dy, g.dz);
    let _ = writeln!(s, "# Ms = {ms:?}\n# precision = {precision}");
    for idx in 0..m.len() {
        let (i, j, k) = g.unindex(idx);
        let v = m.get(idx);
        let _ = writeln!(s, "{i} {j} {k} {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
    }
    s
}

/// Parses dump text. `source` only labels errors.
pub fn parse_field_dump(text: &str, source: &Path) -> Result<FieldDump> {
    let err = |message: String| Error::Dump {
        path: source.to_path_buf(),
        message,
    };
    let mut header: Vec<Option<String>> = vec![None; HEADER_KEYS.len()];
    let mut body = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            let Some((key, value)) = rest.split_once('=') else {
                return Err(err(format!("line {}: malformed header {line:?}", no + 1)));
            };
            let key = key.trim();
            let slot = HEADER_KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| err(format!("line {}: unknown header key {key:?}", no + 1)))?;
            header[slot] = Some(value.trim().to_string());
        } else if !line.is_empty() {
            body.push((no + 1, line));
        }
    }
    let field = |slot: usize| -> Result<&str> {
        header[slot]
            .as_deref()
            .ok_or_else(|| err(format!("malformed header: missing {}", HEADER_KEYS[slot])))
    };
    let mut n = [0usize; 3];
    for (c, slot) in n.iter_mut().zip(0..3) {
        let raw = field(slot)?;
        *c = raw
            .parse()
            .map_err(|_| err(format!("malformed header: {} = {raw:?}", HEADER_KEYS[slot])))?;
    }
    let mut cell = [0.0; 3];
    for (c, slot) in cell.iter_mut().zip(3..6) {
        let raw = field(slot)?;
        *c = raw
            .parse()
            .map_err(|_| err(format!("malformed header: {} = {raw:?}", HEADER_KEYS[slot])))?;
    }
    let grid = Grid::new(n, cell).map_err(|e| err(format!("malformed header: {e}")))?;
    let raw = field(6)?;
    let ms: f64 = raw
        .parse()
        .map_err(|_| err(format!("malformed header: Ms = {raw:?}")))?;
    let precision: Precision = field(7)?
        .parse()
        .map_err(|e| err(format!("malformed header: {e}")))?;

    if body.len() != grid.cell_count() {
        return Err(err(format!(
            "cell count mismatch: header gives {} cells, body has {} lines",
            grid.cell_count(),
            body.len()
        )));
    }
    let mut m = VectorField::zeros(grid);
    let mut seen = vec![false; grid.cell_count()];
    for (line_no, line) in body {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 6 {
            return Err(err(format!("line {line_no}: expected `i j k Mx My Mz`")));
        }
        let bad = || err(format!("line {line_no}: cannot parse {line:?}"));
        let mut ijk = [0usize; 3];
        for (dst, p) in ijk.iter_mut().zip(&parts[..3]) {
            *dst = p.parse().map_err(|_| bad())?;
        }
        if ijk[0] >= grid.nx || ijk[1] >= grid.ny || ijk[2] >= grid.nz {
            return Err(err(format!("line {line_no}: cell {ijk:?} outside grid")));
        }
        let mut v = [0.0; 3];
        for (dst, p) in v.iter_mut().zip(&parts[3..]) {
            *dst = p.parse().map_err(|_| bad())?;
        }
        let idx = grid.index(ijk[0], ijk[1], ijk[2]);
        if std::mem::replace(&mut seen[idx], true) {
            return Err(err(format!("line {line_no}: cell {ijk:?} listed twice")));
        }
        m.set(idx, v);
    }
    Ok(FieldDump {
        grid,
        ms,
        precision,
        m,
    })
}

pub fn write_field_dump(path: &Path, m: &VectorField, ms: f64, precision: Precision) -> Result<()> {
    fs::write(path, format_field_dump(m, ms, precision)).map_err(|e| Error::Dump {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn read_field_dump(path: &Path) -> Result<FieldDump> {
    let text = fs::read_to_string(path).map_err(|e| Error::Dump {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_field_dump(&text, path)
}
