//! Grid import and export.
//!
//! Binary layout: one JSON header line `{dim, box_side, samples_per_dim, domain}`
//! followed by `N^n` little-endian `(re, im)` pairs of `f64`.
//! CSV layout: `# {header}`, a `re,im` column line, then one row per sample.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{Domain, Grid, GridFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridHeader {
    pub dim: usize,
    pub box_side: f64,
    pub samples_per_dim: usize,
    #[serde(default = "space")]
    pub domain: Domain,
}

fn space() -> Domain {
    Domain::Space
}

impl GridHeader {
    fn of(f: &GridFunction) -> Self {
        let g = f.grid();
        Self {
            dim: g.dim,
            box_side: g.box_side,
            samples_per_dim: g.samples_per_dim,
            domain: f.domain(),
        }
    }

    fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.box_side, self.samples_per_dim)
    }
}

pub fn write_binary<W: Write>(f: &GridFunction, mut out: W) -> Result<()> {
    serde_json::to_writer(&mut out, &GridHeader::of(f))?;
    out.write_all(b"\n")?;
    let mut buf = Vec::with_capacity(16 * f.data().len());
    for z in f.data() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: BufRead>(mut input: R) -> Result<GridFunction> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: GridHeader = serde_json::from_str(line.trim())?;
    let grid = header.grid()?;
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() != 16 * grid.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} payload bytes, found {}",
            16 * grid.len(),
            bytes.len()
        )));
    }
    let word = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8-byte chunk"));
    let data = bytes
        .chunks_exact(16)
        .map(|c| Complex64::new(word(&c[..8]), word(&c[8..])))
        .collect();
    GridFunction::new(grid, header.domain, data)
}

pub fn write_csv<W: Write>(f: &GridFunction, mut out: W) -> Result<()> {
    writeln!(out, "# {}", serde_json::to_string(&GridHeader::of(f))?)?;
    writeln!(out, "re,im")?;
    for z in f.data() {
        writeln!(out, "{:.17e},{:.17e}", z.re, z.im)?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> Result<GridFunction> {
    let mut lines = input.lines();
    let first = lines.next().ok_or_else(|| Error::InvalidInput("empty CSV".into()))??;
    let json = first
        .strip_prefix('#')
        .ok_or_else(|| Error::InvalidInput("CSV must start with a `# {header}` line".into()))?;
    let header: GridHeader = serde_json::from_str(json.trim())?;
    let grid = header.grid()?;
    let mut data = Vec::with_capacity(grid.len());
    for (row, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line == "re,im" {
            continue;
        }
        let (re, im) = line
            .split_once(',')
            .ok_or_else(|| Error::InvalidInput(format!("row {row}: expected `re,im`")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("row {row}: {e}")))
        };
        data.push(Complex64::new(parse(re)?, parse(im)?));
    }
    GridFunction::new(grid, header.domain, data)
}
