use std::fmt::Write;

use num_complex::Complex64;

use super::network::MAGIC;
use super::{content_lines, header_field, parse_bus, parse_bus_count, parse_float, parse_header};
use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Largest dimension accepted for a dense estimate.
const MAX_DENSE: usize = 4096;

/// Estimated admittance matrix with the estimator name and its settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateFile {
    pub estimator: String,
    pub config: Vec<(String, String)>,
    pub matrix: CMat,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|ch| ch.is_ascii_alphanumeric() || matches!(ch, '_' | '-' | '.'))
}

/// Writes the network header with an `estimator` field, one `C,key,value`
/// line per setting and a dense `Y,i,j,Re,Im` section.
pub fn write_estimate(file: &EstimateFile) -> String {
    let n = file.matrix.nrows();
    let mut out = format!("{MAGIC}, n={n}, estimator={}\n", file.estimator);
    for (k, v) in &file.config {
        let _ = writeln!(out, "C,{k},{v}");
    }
    for i in 0..n {
        for j in 0..n {
            let z = file.matrix[(i, j)];
            let _ = writeln!(out, "Y,{},{},{:e},{:e}", i + 1, j + 1, z.re, z.im);
        }
    }
    out
}

pub fn parse_estimate(text: &str) -> Result<EstimateFile> {
    let mut lines = content_lines(text);
    let (hline, htext) = lines.next().ok_or_else(|| Error::parse(1, "empty estimate file"))?;
    let header = parse_header(hline, htext, MAGIC)?;
    if let Some((k, _)) = header.iter().find(|(k, _)| k != "n" && k != "estimator") {
        return Err(Error::parse(hline, format!("unknown header field {k:?}")));
    }
    let n = parse_bus_count(header_field(&header, "n", hline)?, hline)?;
    if n > MAX_DENSE {
        return Err(Error::parse(hline, format!("dense estimate limited to n ≤ {MAX_DENSE}")));
    }
    let estimator = header_field(&header, "estimator", hline)?.to_string();
    if !valid_key(&estimator) {
        return Err(Error::parse(hline, format!("invalid estimator name {estimator:?}")));
    }

    let mut config = Vec::new();
    let mut matrix = CMat::zeros(n, n);
    let mut seen = vec![false; n * n];
    for (line, content) in lines {
        let (tag, rest) = content.split_once(',').unwrap_or((content, ""));
        match tag.trim() {
            "C" => {
                let (k, v) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::parse(line, "config record needs C,key,value"))?;
                let k = k.trim();
                if !valid_key(k) {
                    return Err(Error::parse(line, format!("invalid config key {k:?}")));
                }
                config.push((k.to_string(), v.trim().to_string()));
            }
            "Y" => {
                let fields: Vec<&str> = rest.split(',').map(str::trim).collect();
                let [i, j, re, im] = fields.as_slice() else {
                    return Err(Error::parse(line, "matrix record needs Y,i,j,Re,Im"));
                };
                let (i, j) = (parse_bus(i, n, line)?, parse_bus(j, n, line)?);
                if std::mem::replace(&mut seen[i * n + j], true) {
                    return Err(Error::parse(line, format!("entry ({},{}) given twice", i + 1, j + 1)));
                }
                matrix[(i, j)] = Complex64::new(parse_float(re, line, "Re")?, parse_float(im, line, "Im")?);
            }
            other => return Err(Error::parse(line, format!("unknown record type {other:?}"))),
        }
    }
    if let Some(k) = seen.iter().position(|s| !s) {
        return Err(Error::parse(hline, format!("entry ({},{}) missing", k / n + 1, k % n + 1)));
    }
    Ok(EstimateFile {
        estimator,
        config,
        matrix,
    })
}
