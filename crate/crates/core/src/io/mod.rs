//! Text formats for networks, phasor datasets, estimates and run configs.

mod config;
mod estimate;
mod network;
mod phasors;

use std::path::Path;

pub use config::{parse_config, ConfigEntry, ConfigFile};
pub use estimate::{parse_estimate, write_estimate, EstimateFile};
pub use network::{parse_network, write_network};
pub use phasors::{parse_phasors, write_phasors};

use crate::error::{Error, Result};
use crate::grid_model::NetworkSpec;
use crate::scenario::PhasorDataset;

/// Largest bus count accepted by the parsers.
pub const MAX_BUSES: usize = 1 << 16;

/// Non-empty, comment-stripped lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let s = raw.split('#').next().unwrap_or("").trim();
        (!s.is_empty()).then_some((i + 1, s))
    })
}

/// Parses `<magic>, key=value, ...` into ordered pairs.
fn parse_header(line: usize, text: &str, magic: &str) -> Result<Vec<(String, String)>> {
    let mut parts = text.split(',').map(str::trim);
    let first = parts.next().unwrap_or("");
    if first != magic {
        return Err(Error::parse(line, format!("expected header starting with {magic:?}, found {first:?}")));
    }
    let mut pairs: Vec<(String, String)> = Vec::new();
    for part in parts {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("header field {part:?} is not key=value")))?;
        let k = k.trim().to_string();
        if pairs.iter().any(|(seen, _)| *seen == k) {
            return Err(Error::parse(line, format!("header field {k:?} repeated")));
        }
        pairs.push((k, v.trim().to_string()));
    }
    Ok(pairs)
}

fn header_field<'a>(pairs: &'a [(String, String)], key: &str, line: usize) -> Result<&'a str> {
    pairs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::parse(line, format!("header is missing {key}=")))
}

fn parse_float(s: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("{what}: {s:?} is not a number")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("{what}: {s:?} is not finite")));
    }
    Ok(v)
}

fn parse_int<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("{what}: {s:?} is not a valid integer")))
}

/// 1-based bus index in a file to a 0-based index.
fn parse_bus(s: &str, n: usize, line: usize) -> Result<usize> {
    let k: usize = parse_int(s, line, "bus index")?;
    if k == 0 || k > n {
        return Err(Error::parse(line, format!("bus index {k} outside 1..={n}")));
    }
    Ok(k - 1)
}

fn parse_bus_count(s: &str, line: usize) -> Result<usize> {
    let n: usize = parse_int(s, line, "n")?;
    if n == 0 || n > MAX_BUSES {
        return Err(Error::parse(line, format!("n = {n} outside 1..={MAX_BUSES}")));
    }
    Ok(n)
}

/// Kind of a gridspect text file, judged from its header line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Network,
    Phasors,
    Estimate,
}

pub fn file_kind(text: &str) -> Option<FileKind> {
    let (_, header) = content_lines(text).next()?;
    let mut fields = header.split(',').map(str::trim);
    match fields.next()? {
        phasors::MAGIC => Some(FileKind::Phasors),
        network::MAGIC if fields.any(|f| f.starts_with("estimator=")) => Some(FileKind::Estimate),
        network::MAGIC => Some(FileKind::Network),
        _ => None,
    }
}

pub fn read_network(path: &Path) -> Result<NetworkSpec> {
    parse_network(&std::fs::read_to_string(path)?)
}

pub fn read_phasors(path: &Path) -> Result<PhasorDataset> {
    parse_phasors(&std::fs::read_to_string(path)?)
}

pub fn read_estimate(path: &Path) -> Result<EstimateFile> {
    parse_estimate(&std::fs::read_to_string(path)?)
}
