use std::fmt::Write;

use num_complex::Complex64;

use super::{content_lines, header_field, parse_bus, parse_bus_count, parse_float, parse_header};
use crate::error::{Error, Result};
use crate::grid_model::{Branch, NetworkSpec, Shunt};

pub(super) const MAGIC: &str = "gridspect-network v1";

/// Reads the bus/branch/shunt text format:
///
/// ```text
/// gridspect-network v1, n=3
/// B,1,2,0.5,-1.0     # branch 1-2, y = g + jb
/// S,1,0.0,0.1        # shunt at bus 1
/// ```
pub fn parse_network(text: &str) -> Result<NetworkSpec> {
    let mut lines = content_lines(text);
    let (hline, htext) = lines.next().ok_or_else(|| Error::parse(1, "empty network file"))?;
    let header = parse_header(hline, htext, MAGIC)?;
    if let Some((k, _)) = header.iter().find(|(k, _)| k != "n") {
        return Err(Error::parse(hline, format!("unknown header field {k:?}")));
    }
    let n = parse_bus_count(header_field(&header, "n", hline)?, hline)?;

    let mut branches = Vec::new();
    let mut shunts = Vec::new();
    for (line, content) in lines {
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        match fields.as_slice() {
            ["B", i, j, g, b] => branches.push(Branch {
                from: parse_bus(i, n, line)?,
                to: parse_bus(j, n, line)?,
                admittance: Complex64::new(parse_float(g, line, "g")?, parse_float(b, line, "b")?),
            }),
            ["S", i, g, b] => shunts.push(Shunt {
                bus: parse_bus(i, n, line)?,
                admittance: Complex64::new(parse_float(g, line, "g")?, parse_float(b, line, "b")?),
            }),
            ["B", ..] => return Err(Error::parse(line, "branch record needs B,i,j,g,b")),
            ["S", ..] => return Err(Error::parse(line, "shunt record needs S,i,g,b")),
            [tag, ..] => return Err(Error::parse(line, format!("unknown record type {tag:?}"))),
            [] => unreachable!("content lines are non-empty"),
        }
    }
    NetworkSpec::new(n, branches, shunts)
}

pub fn write_network(spec: &NetworkSpec) -> String {
    let mut out = format!("{MAGIC}, n={}\n", spec.n());
    for b in spec.branches() {
        let y = b.admittance;
        let _ = writeln!(out, "B,{},{},{:e},{:e}", b.from + 1, b.to + 1, y.re, y.im);
    }
    for s in spec.shunts() {
        let y = s.admittance;
        let _ = writeln!(out, "S,{},{:e},{:e}", s.bus + 1, y.re, y.im);
    }
    out
}
