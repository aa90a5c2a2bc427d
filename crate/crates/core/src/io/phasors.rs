use std::fmt::Write;

use num_complex::Complex64;

use super::{content_lines, header_field, parse_bus_count, parse_float, parse_header, parse_int};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scenario::PhasorDataset;

pub(super) const MAGIC: &str = "gridspect-phasors v1";
const FIELDS: [&str; 6] = ["n", "N", "sigma_v", "sigma_i", "seed", "centered"];

/// Reads a measurement file: a header naming `n`, `N`, the noise levels,
/// the seed and the centered flag, then one line of `4n` numbers per sample
/// (`Re V₁, Im V₁, …, Re Vₙ, Im Vₙ, Re I₁, …, Im Iₙ`).
pub fn parse_phasors(text: &str) -> Result<PhasorDataset> {
    let mut lines = content_lines(text);
    let (hline, htext) = lines.next().ok_or_else(|| Error::parse(1, "empty phasor file"))?;
    let header = parse_header(hline, htext, MAGIC)?;
    if let Some((k, _)) = header.iter().find(|(k, _)| !FIELDS.contains(&k.as_str())) {
        return Err(Error::parse(hline, format!("unknown header field {k:?}")));
    }
    let n = parse_bus_count(header_field(&header, "n", hline)?, hline)?;
    let samples: usize = parse_int(header_field(&header, "N", hline)?, hline, "N")?;
    let sigma_v = parse_float(header_field(&header, "sigma_v", hline)?, hline, "sigma_v")?;
    let sigma_i = parse_float(header_field(&header, "sigma_i", hline)?, hline, "sigma_i")?;
    let seed: u64 = parse_int(header_field(&header, "seed", hline)?, hline, "seed")?;
    let centered = match header_field(&header, "centered", hline)? {
        "0" => false,
        "1" => true,
        other => return Err(Error::parse(hline, format!("centered must be 0 or 1, got {other:?}"))),
    };
    if samples == 0 {
        return Err(Error::parse(hline, "N must be at least 1"));
    }
    if sigma_v < 0.0 || sigma_i < 0.0 {
        return Err(Error::parse(hline, "noise levels must be nonnegative"));
    }

    let mut v = Vec::new();
    let mut i = Vec::new();
    let mut count = 0usize;
    for (line, content) in lines {
        if count == samples {
            return Err(Error::parse(line, format!("more than N = {samples} data lines")));
        }
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != 4 * n {
            return Err(Error::parse(line, format!("expected {} values, found {}", 4 * n, fields.len())));
        }
        for (k, pair) in fields.chunks(2).enumerate() {
            let z = Complex64::new(parse_float(pair[0], line, "real part")?, parse_float(pair[1], line, "imaginary part")?);
            if k < n {
                v.push(z);
            } else {
                i.push(z);
            }
        }
        count += 1;
    }
    if count != samples {
        return Err(Error::parse(hline, format!("header declares N = {samples} but {count} data lines follow")));
    }
    let mut ds = PhasorDataset::new(
        CMat::from_vec(n, samples, v),
        CMat::from_vec(n, samples, i),
        sigma_v,
        sigma_i,
        seed,
    )?;
    ds.centered = centered;
    Ok(ds)
}

/// Writes measurements with 17 significant digits, which round-trips
/// every `f64` exactly.
pub fn write_phasors(ds: &PhasorDataset) -> String {
    let (n, samples) = (ds.n(), ds.samples());
    let mut out = String::with_capacity(samples * n * 4 * 25 + 128);
    let _ = writeln!(
        out,
        "{MAGIC}, n={n}, N={samples}, sigma_v={:e}, sigma_i={:e}, seed={}, centered={}",
        ds.sigma_v,
        ds.sigma_i,
        ds.seed,
        u8::from(ds.centered)
    );
    for t in 0..samples {
        let (v, i) = (ds.v_meas.column(t), ds.i_meas.column(t));
        for (k, z) in v.iter().chain(i.iter()).enumerate() {
            if k > 0 {
                out.push(',');
            }
            let _ = write!(out, "{:.16e},{:.16e}", z.re, z.im);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::standard_circular_matrix;

    #[test]
    fn round_trip_is_exact() {
        let v = standard_circular_matrix(3, 5, 1);
        let i = standard_circular_matrix(3, 5, 2).scale(1e-7);
        let mut ds = PhasorDataset::new(v, i, 1.25e-4, 3e-9, 77).unwrap();
        ds.centered = true;
        let back = parse_phasors(&write_phasors(&ds)).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn rejects_malformed_input() {
        let head = "gridspect-phasors v1, n=1, N=1, sigma_v=0, sigma_i=0, seed=0, centered=0\n";
        assert!(parse_phasors(&format!("{head}1,2,3,4\n")).is_ok());
        for text in [
            head.to_string(),
            format!("{head}1,2,3\n"),
            format!("{head}1,2,3,4\n1,2,3,4\n"),
            format!("{head}1,2,x,4\n"),
            head.replace("centered=0", "centered=2") + "1,2,3,4\n",
            head.replace("sigma_v=0", "sigma_v=-1") + "1,2,3,4\n",
            head.replace(", seed=0", "") + "1,2,3,4\n",
        ] {
            assert!(parse_phasors(&text).is_err(), "{text:?}");
        }
    }
}
