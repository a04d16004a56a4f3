//! JSON round-tripping for operators plus atomic file writes.
//!
//! Operators serialise as `{ "dims": [...], "re": [...], "im": [...] }` with
//! entries in row-major order. Writing uses a fixed 17-significant-digit
//! format so that byte-identical output is reproducible across runs; reading
//! accepts any JSON number.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::error::{OpError, Result};
use crate::op::{DensityOperator, HermitianOperator};

#[derive(Deserialize)]
struct OperatorRecord {
    dims: Vec<usize>,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Render a float with 17 significant digits in scientific notation.
fn fmt_f64(buf: &mut String, v: f64) {
    write!(buf, "{v:.16e}").expect("string write");
}

/// Serialise an operator to the canonical JSON form.
pub fn operator_to_json(op: &HermitianOperator) -> String {
    let n = op.dim();
    let mut out = String::with_capacity(32 * n * n);
    out.push_str("{\"dims\":[");
    for (i, d) in op.dims().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{d}").expect("string write");
    }
    out.push_str("],\"re\":[");
    for i in 0..n {
        for j in 0..n {
            if i > 0 || j > 0 {
                out.push(',');
            }
            fmt_f64(&mut out, op.entry(i, j).re);
        }
    }
    out.push_str("],\"im\":[");
    for i in 0..n {
        for j in 0..n {
            if i > 0 || j > 0 {
                out.push(',');
            }
            fmt_f64(&mut out, op.entry(i, j).im);
        }
    }
    out.push_str("]}");
    out
}

pub fn operator_from_json(text: &str) -> Result<HermitianOperator> {
    let rec: OperatorRecord = serde_json::from_str(text)
        .map_err(|e| OpError::BadArgument(format!("operator JSON parse: {e}")))?;
    let total: usize = rec.dims.iter().product();
    if rec.re.len() != total * total || rec.im.len() != total * total {
        return Err(OpError::DimMismatch(rec.re.len(), total * total));
    }
    let entries: Vec<C64> = rec
        .re
        .iter()
        .zip(&rec.im)
        .map(|(&r, &i)| C64::new(r, i))
        .collect();
    HermitianOperator::new(rec.dims, entries)
}

pub fn state_from_json(text: &str) -> Result<DensityOperator> {
    DensityOperator::new(operator_from_json(text)?)
}

/// Write a file atomically: write to a sibling temp path then rename.
pub fn atomic_write(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let base = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{base}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Render a finite nonnegative rate, mapping positive infinity to `"inf"`.
pub fn fmt_rate(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        "inf".into()
    } else {
        format!("{v:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_round_trip() {
        let op = HermitianOperator::new(
            vec![2],
            vec![
                C64::new(0.3, 0.0),
                C64::new(0.1, -0.25),
                C64::new(0.1, 0.25),
                C64::new(0.7, 0.0),
            ],
        )
        .unwrap();
        let text = operator_to_json(&op);
        let back = operator_from_json(&text).unwrap();
        assert!(back.sub(&op).unwrap().frob_norm() == 0.0);
        // Serialisation is deterministic byte for byte.
        assert_eq!(text, operator_to_json(&back));
    }

    #[test]
    fn state_validation_on_read() {
        let bad = "{\"dims\":[2],\"re\":[1.0,0.0,0.0,1.0],\"im\":[0.0,0.0,0.0,0.0]}";
        assert!(state_from_json(bad).is_err()); // trace 2
        let good = "{\"dims\":[2],\"re\":[0.5,0.0,0.0,0.5],\"im\":[0.0,0.0,0.0,0.0]}";
        assert!(state_from_json(good).is_ok());
    }

    #[test]
    fn rate_formatting() {
        assert_eq!(fmt_rate(f64::INFINITY), "inf");
        assert!(fmt_rate(0.5).starts_with("5.0"));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = std::env::temp_dir().join("steinlab-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.json");
        atomic_write(&path, b"one").unwrap();
        atomic_write(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
