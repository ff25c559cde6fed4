//! Binary field snapshots.
//!
//! A snapshot is a UTF-8 header of `key: value` lines, a blank line, then
//! every node value (boundary included) as little-endian `f64` pairs
//! `(re, im)` in row-major order with the last axis fastest. Header keys:
//! `format`, `dim`, `lower`, `upper`, `cells` (space-separated per axis),
//! `step`, `time`, `scheme`, `lambda`, `tau`.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use logse_core::{Complex64, GridFunction, GridSpec};

use crate::error::{CliError, CliResult};

pub const FORMAT: &str = "logse-snapshot-1";

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMeta {
    pub step: usize,
    pub time: f64,
    pub scheme: String,
    pub lambda: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub meta: SnapshotMeta,
    pub field: GridFunction,
}

fn join<T: ToString>(xs: impl Iterator<Item = T>) -> String {
    xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_snapshot<W: Write>(mut w: W, meta: &SnapshotMeta, u: &GridFunction) -> CliResult<()> {
    let s = u.spec();
    let axes = 0..s.dim();
    writeln!(w, "format: {FORMAT}")?;
    writeln!(w, "dim: {}", s.dim())?;
    writeln!(w, "lower: {}", join(axes.clone().map(|a| s.lower(a))))?;
    writeln!(w, "upper: {}", join(axes.clone().map(|a| s.upper(a))))?;
    writeln!(w, "cells: {}", join(axes.map(|a| s.cells(a))))?;
    writeln!(w, "step: {}", meta.step)?;
    writeln!(w, "time: {}", meta.time)?;
    writeln!(w, "scheme: {}", meta.scheme)?;
    writeln!(w, "lambda: {}", meta.lambda)?;
    writeln!(w, "tau: {}", meta.tau)?;
    writeln!(w)?;
    let mut buf = Vec::with_capacity(16 * u.values().len());
    for z in u.values() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn save(path: &Path, meta: &SnapshotMeta, u: &GridFunction) -> CliResult<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_snapshot(f, meta, u)
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Snapshot(msg.into())
}

fn field<T: std::str::FromStr>(h: &BTreeMap<String, String>, key: &str) -> CliResult<T> {
    h.get(key)
        .ok_or_else(|| bad(format!("missing header `{key}`")))?
        .parse()
        .map_err(|_| bad(format!("bad header `{key}`")))
}

fn list<T: std::str::FromStr>(h: &BTreeMap<String, String>, key: &str) -> CliResult<Vec<T>> {
    h.get(key)
        .ok_or_else(|| bad(format!("missing header `{key}`")))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad(format!("bad header `{key}`"))))
        .collect()
}

pub fn read_snapshot<R: Read>(r: R) -> CliResult<Snapshot> {
    let mut r = BufReader::new(r);
    let mut header = BTreeMap::new();
    loop {
        let mut line = String::new();
        if r.read_line(&mut line)? == 0 {
            return Err(bad("header is not terminated by a blank line"));
        }
        let line = line.trim_end_matches(['\n', '\r']);
        if line.is_empty() {
            break;
        }
        let (k, v) = line.split_once(':').ok_or_else(|| bad(format!("bad header line `{line}`")))?;
        header.insert(k.trim().to_string(), v.trim().to_string());
    }
    if header.get("format").map(String::as_str) != Some(FORMAT) {
        return Err(bad("unknown format"));
    }
    let dim: usize = field(&header, "dim")?;
    let lower: Vec<f64> = list(&header, "lower")?;
    let upper: Vec<f64> = list(&header, "upper")?;
    let cells: Vec<usize> = list(&header, "cells")?;
    if lower.len() != dim || upper.len() != dim || cells.len() != dim {
        return Err(bad("axis lists do not match dim"));
    }
    let bounds: Vec<(f64, f64)> = lower.into_iter().zip(upper).collect();
    let spec = GridSpec::new(&bounds, &cells)?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != 16 * spec.node_count() {
        return Err(bad(format!(
            "payload has {} bytes, expected {}",
            payload.len(),
            16 * spec.node_count()
        )));
    }
    let values = payload
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok(Snapshot {
        meta: SnapshotMeta {
            step: field(&header, "step")?,
            time: field(&header, "time")?,
            scheme: field(&header, "scheme")?,
            lambda: field(&header, "lambda")?,
            tau: field(&header, "tau")?,
        },
        field: GridFunction::from_values(&spec, values)?,
    })
}

pub fn load(path: &Path) -> CliResult<Snapshot> {
    read_snapshot(std::fs::File::open(path)?)
}
