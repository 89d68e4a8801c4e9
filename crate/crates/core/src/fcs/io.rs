use std::io::{BufRead, BufReader, Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fcs::IsometryV;
use crate::linalg::CMat;

/// Writes `# n=.. k=..`, a `row,col,re,im` header and the entries row-major.
pub fn write_isometry_csv<W: Write>(v: &IsometryV, mut w: W) -> Result<()> {
    writeln!(w, "# n={} k={}", v.physical_dim(), v.aux_dim())?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["row", "col", "re", "im"])?;
    let m = v.matrix();
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            let z = m[(r, col)];
            out.write_record([r.to_string(), col.to_string(), format!("{:?}", z.re), format!("{:?}", z.im)])?;
        }
    }
    out.flush()?;
    Ok(())
}

fn header_value(line: &str, key: &str) -> Option<usize> {
    line.split_whitespace()
        .find_map(|t| t.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .and_then(|v| v.parse().ok())
}

pub fn read_isometry_csv<R: Read>(r: R) -> Result<IsometryV> {
    let mut reader = BufReader::new(r);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let first = first.trim();
    let bad = || Error::Config("isometry CSV must start with '# n=<n> k=<k>'".into());
    if !first.starts_with('#') {
        return Err(bad());
    }
    let n = header_value(first, "n").ok_or_else(bad)?;
    let k = header_value(first, "k").ok_or_else(bad)?;
    let mut m = CMat::zeros(n * k, k);
    let mut seen = vec![false; n * k * k];
    for rec in csv::Reader::from_reader(reader).records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Config("isometry CSV rows need 4 fields".into()));
        let parse_err = |e: &dyn std::fmt::Display| Error::Config(format!("isometry CSV: {e}"));
        let row: usize = field(0)?.trim().parse().map_err(|e| parse_err(&e))?;
        let col: usize = field(1)?.trim().parse().map_err(|e| parse_err(&e))?;
        let re: f64 = field(2)?.trim().parse().map_err(|e| parse_err(&e))?;
        let im: f64 = field(3)?.trim().parse().map_err(|e| parse_err(&e))?;
        if row >= n * k || col >= k {
            return Err(Error::Config(format!("entry ({row},{col}) outside a {}x{k} isometry", n * k)));
        }
        m[(row, col)] = Complex64::new(re, im);
        seen[row * k + col] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Config("isometry CSV is missing entries".into()));
    }
    IsometryV::new(n, k, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcs::aklt_isometry;

    #[test]
    fn round_trip() {
        let v = aklt_isometry();
        let mut buf = Vec::new();
        write_isometry_csv(&v, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# n=3 k=2\nrow,col,re,im\n"));
        assert_eq!(read_isometry_csv(&buf[..]).unwrap(), v);
    }

    #[test]
    fn missing_header_rejected() {
        assert!(read_isometry_csv("row,col,re,im\n".as_bytes()).is_err());
    }
}
