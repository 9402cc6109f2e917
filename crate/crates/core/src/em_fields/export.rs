//! Structured-grid text format:
//!
//! ```text
//! # free-form provenance lines
//! grid nx ny nz lx ly lz ox oy oz
//! x y z Ex Ey Ez Bx By Bz
//! ...
//! ```
//!
//! One node per line in storage order (x slowest). Floats use 17 significant digits.

use std::fmt::Write as _;

use super::EMField;
use crate::error::{Error, Result};
use crate::grid_forms::{GridSpec3, Signature, VectorField3};

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_grid_text(f: &EMField, provenance: &[String]) -> String {
    let g = f.grid();
    let mut out = String::with_capacity(g.len() * 9 * 25);
    for line in provenance {
        for l in line.lines() {
            let _ = writeln!(out, "# {l}");
        }
    }
    let [nx, ny, nz] = g.counts();
    let l = g.lengths().map(fmt17);
    let o = g.origin().map(fmt17);
    let _ = writeln!(out, "grid {nx} {ny} {nz} {} {} {} {} {} {}", l[0], l[1], l[2], o[0], o[1], o[2]);
    for idx in 0..g.len() {
        let p = g.node_at(idx);
        let e = f.e().at(idx);
        let b = f.b().at(idx);
        let vals: Vec<String> = p.iter().chain(&e).chain(&b).map(|&v| fmt17(v)).collect();
        out.push_str(&vals.join(" "));
        out.push('\n');
    }
    out
}

pub struct GridFile {
    pub provenance: Vec<String>,
    pub field: EMField,
}

pub fn read_grid_text(text: &str) -> Result<GridFile> {
    let mut provenance = Vec::new();
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let mut header = None;
    for (n, line) in lines.by_ref() {
        if let Some(rest) = line.strip_prefix('#') {
            provenance.push(rest.trim().to_string());
            continue;
        }
        header = Some((n, line));
        break;
    }
    let (hn, header) = header.ok_or_else(|| Error::Parse("missing grid header line".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 10 || tokens[0] != "grid" {
        return Err(Error::Parse(format!("line {}: expected `grid nx ny nz lx ly lz ox oy oz`", hn + 1)));
    }
    let count = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("line {}: {e}", hn + 1)));
    let float = |s: &str, n: usize| s.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}: `{s}`", n + 1)));
    let counts = [count(tokens[1])?, count(tokens[2])?, count(tokens[3])?];
    let lengths = [float(tokens[4], hn)?, float(tokens[5], hn)?, float(tokens[6], hn)?];
    let origin = [float(tokens[7], hn)?, float(tokens[8], hn)?, float(tokens[9], hn)?];
    let grid = GridSpec3::with_origin(counts, lengths, origin)?;
    let mut e = [vec![], vec![], vec![]];
    let mut b = [vec![], vec![], vec![]];
    for (n, line) in lines {
        let vals = line.split_whitespace().map(|s| float(s, n)).collect::<Result<Vec<f64>>>()?;
        if vals.len() != 9 {
            return Err(Error::Parse(format!("line {}: expected 9 columns, found {}", n + 1, vals.len())));
        }
        for a in 0..3 {
            e[a].push(vals[3 + a]);
            b[a].push(vals[6 + a]);
        }
    }
    if e[0].len() != grid.len() {
        return Err(Error::Parse(format!("expected {} node records, found {}", grid.len(), e[0].len())));
    }
    let field = EMField::new(
        VectorField3::from_components(grid, e)?,
        VectorField3::from_components(grid, b)?,
        Signature::Minkowski,
    )?;
    Ok(GridFile { provenance, field })
}
