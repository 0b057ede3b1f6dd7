//! Flat-file formats for matrices and fields.
//!
//! Matrices: CSV with one row per grid node and `re,im` pairs per column, or
//! raw little-endian complex128 (row-major) next to a JSON sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{Grid, GridSpec};
use super::operator::OperatorMatrix;
use crate::error::{Error, Result};

/// Version tag written into every sidecar.
pub const CHECK_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub grid: GridSpec,
    pub scheme: String,
    pub paper_check_version: String,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

pub fn write_matrix_csv(path: &Path, op: &OperatorMatrix) -> Result<()> {
    let k = op.kernel();
    let mut out = String::with_capacity(k.len() * 48);
    for i in 0..k.nrows() {
        let row: Vec<String> = (0..k.ncols())
            .map(|j| format!("{:e},{:e}", k[(i, j)].re, k[(i, j)].im))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_bytes(path, out.as_bytes())
}

/// Path of the sidecar belonging to a binary matrix file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes `path` (raw samples) and `path.json` (sidecar).
pub fn write_matrix_binary(path: &Path, op: &OperatorMatrix, scheme: &str) -> Result<()> {
    let k = op.kernel();
    let mut buf = Vec::with_capacity(k.len() * 16);
    for i in 0..k.nrows() {
        for j in 0..k.ncols() {
            buf.extend_from_slice(&k[(i, j)].re.to_le_bytes());
            buf.extend_from_slice(&k[(i, j)].im.to_le_bytes());
        }
    }
    write_bytes(path, &buf)?;
    let side = Sidecar {
        grid: op.grid().spec(),
        scheme: scheme.to_string(),
        paper_check_version: CHECK_VERSION.to_string(),
    };
    write_bytes(&sidecar_path(path), serde_json::to_string_pretty(&side)?.as_bytes())
}

pub fn read_matrix_binary(path: &Path) -> Result<(OperatorMatrix, Sidecar)> {
    let side_path = sidecar_path(path);
    let side: Sidecar = serde_json::from_slice(&fs::read(&side_path).map_err(|e| io_err(&side_path, e))?)?;
    let grid = Grid::try_from(side.grid.clone())?;
    let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
    let n = grid.len();
    if bytes.len() != n * n * 16 {
        return Err(Error::InvalidArgument(format!(
            "{} holds {} bytes, expected {}",
            path.display(),
            bytes.len(),
            n * n * 16
        )));
    }
    let val = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8-byte slice"));
    let k = DMatrix::from_fn(n, n, |i, j| {
        let o = (i * n + j) * 16;
        Complex64::new(val(o), val(o + 8))
    });
    Ok((OperatorMatrix::new(grid, k)?, side))
}

/// CSV with the node coordinates followed by `re,im` of the value.
pub fn write_field_csv(path: &Path, grid: &Grid, values: &[Complex64]) -> Result<()> {
    crate::error::check_dim(grid.len(), values.len())?;
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let n = grid.dim();
    let header: Vec<String> = (0..n).map(|a| format!("x{a}")).chain(["re".into(), "im".into()]).collect();
    let mut out = header.join(",");
    out.push('\n');
    for (k, v) in values.iter().enumerate() {
        for c in grid.node(k) {
            out.push_str(&format!("{c:e},"));
        }
        out.push_str(&format!("{:e},{:e}\n", v.re, v.im));
    }
    f.write_all(out.as_bytes()).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::cube(1, 2.0, 5).unwrap();
        let op = OperatorMatrix::from_fn(&g, |x, y| Complex64::new(x[0] - y[0], x[0] * y[0]));
        let p = dir.path().join("m.bin");
        write_matrix_binary(&p, &op, "berezin").unwrap();
        let (back, side) = read_matrix_binary(&p).unwrap();
        assert_eq!(back, op);
        assert_eq!(side.scheme, "berezin");
        assert_eq!(side.paper_check_version, CHECK_VERSION);
    }

    #[test]
    fn csv_layouts() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::cube(1, 1.0, 2).unwrap();
        let op = OperatorMatrix::identity(&g);
        let p = dir.path().join("m.csv");
        write_matrix_csv(&p, &op).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), 4);

        let q = dir.path().join("f.csv");
        write_field_csv(&q, &g, &[Complex64::new(1.0, 2.0), Complex64::new(3.0, 4.0)]).unwrap();
        let text = fs::read_to_string(&q).unwrap();
        assert!(text.starts_with("x0,re,im\n"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn missing_file_reports_path() {
        let err = read_matrix_binary(Path::new("/nonexistent/m.bin")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/m.bin.json"));
    }
}
