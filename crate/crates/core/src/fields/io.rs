//! Field persistence: raw little-endian `f64` pairs plus a JSON sidecar,
//! and a CSV export for inspection.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::ComplexField;
use super::grid::UniformGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub dim: usize,
    pub extent: f64,
    pub points: usize,
    pub spacing: f64,
    pub time: f64,
    pub layout: String,
}

impl FieldMeta {
    pub fn of(field: &ComplexField) -> Self {
        let g = field.grid();
        Self {
            dim: g.dim(),
            extent: g.extent(),
            points: g.points(),
            spacing: g.spacing(),
            time: field.time(),
            layout: "f64le re,im interleaved; row-major, last axis fastest".into(),
        }
    }
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Serializes the samples as interleaved little-endian `re, im` doubles.
pub fn encode_binary(field: &ComplexField) -> Vec<u8> {
    let mut out = Vec::with_capacity(field.values().len() * 16);
    for z in field.values() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode_binary(grid: UniformGrid, time: f64, bytes: &[u8]) -> Result<ComplexField> {
    if bytes.len() != grid.len() * 16 {
        return Err(Error::InvalidField(format!(
            "binary payload has {} bytes, expected {}",
            bytes.len(),
            grid.len() * 16
        )));
    }
    let values = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    ComplexField::new(grid, values, time)
}

/// Writes `path` (binary samples) and `path.json` (grid metadata).
pub fn write_field(field: &ComplexField, path: &Path) -> Result<()> {
    fs::write(path, encode_binary(field))?;
    let meta = serde_json::to_string_pretty(&FieldMeta::of(field))?;
    fs::write(sidecar(path), meta + "\n")?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<ComplexField> {
    let meta: FieldMeta = serde_json::from_str(&fs::read_to_string(sidecar(path))?)?;
    let grid = UniformGrid::new(meta.dim, meta.extent, meta.points)?;
    decode_binary(grid, meta.time, &fs::read(path)?)
}

/// CSV with columns `index, x[, y[, z]], re, im`.
pub fn write_field_csv(field: &ComplexField, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    let g = field.grid();
    let names = ["x", "y", "z"];
    let mut header = vec!["index"];
    header.extend(&names[..g.dim()]);
    header.extend(["re", "im"]);
    writeln!(w, "{}", header.join(","))?;
    let values = field.values();
    let mut err = None;
    g.for_each_point(|i, x| {
        if err.is_some() {
            return;
        }
        let mut line = format!("{i}");
        for c in &x[..g.dim()] {
            line.push_str(&format!(",{c:.17e}"));
        }
        line.push_str(&format!(",{:.17e},{:.17e}", values[i].re, values[i].im));
        if let Err(e) = writeln!(w, "{line}") {
            err = Some(e);
        }
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    w.flush()?;
    Ok(())
}
