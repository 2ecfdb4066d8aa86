//! JSON encodings of matrices, spectra and partitions.
//!
//! A matrix is `{"rows": r, "cols": c, "data": [[[w, x, y, z], …], …]}`,
//! row-major with one `[w, x, y, z]` array per entry.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::qmatrix::QMatrix;
use crate::quaternion::{Quaternion, Sphere};
use crate::spectrum::SphericalSpectrum;

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<Vec<[f64; 4]>>,
}

pub fn matrix_to_json(m: &QMatrix) -> Value {
    let data: Vec<Vec<[f64; 4]>> = (0..m.rows()).map(|r| m.row(r).iter().map(|q| q.to_array()).collect()).collect();
    serde_json::to_value(MatrixJson { rows: m.rows(), cols: m.cols(), data }).expect("matrix serializes")
}

pub fn matrix_from_value(v: &Value) -> Result<QMatrix> {
    let mj: MatrixJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("matrix: {e}")))?;
    build(mj)
}

/// Parses a matrix document; syntax errors carry line and column.
pub fn matrix_from_str(text: &str) -> Result<QMatrix> {
    let mj: MatrixJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    build(mj)
}

fn build(mj: MatrixJson) -> Result<QMatrix> {
    if mj.data.len() != mj.rows {
        return Err(Error::Parse(format!("data has {} rows, header says {}", mj.data.len(), mj.rows)));
    }
    let mut entries = Vec::with_capacity(mj.rows * mj.cols);
    for (r, row) in mj.data.iter().enumerate() {
        if row.len() != mj.cols {
            return Err(Error::Parse(format!("data[{r}] has {} entries, header says {}", row.len(), mj.cols)));
        }
        for (c, e) in row.iter().enumerate() {
            if e.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!("data[{r}][{c}] is not finite")));
            }
            entries.push(Quaternion::from_array(*e));
        }
    }
    QMatrix::from_row_major(mj.rows, mj.cols, entries)
}

pub fn read_matrix(path: &Path) -> Result<QMatrix> {
    let text = std::fs::read_to_string(path)?;
    matrix_from_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn spectrum_to_json(s: &SphericalSpectrum) -> Value {
    Value::Array(s.entries.iter().map(|e| json!({"re": e.sphere.re, "rad": e.sphere.rad, "mult": e.mult})).collect())
}

pub fn spheres_to_json(s: &[Sphere]) -> Value {
    Value::Array(s.iter().map(|x| json!({"re": x.re, "rad": x.rad})).collect())
}

/// Parses `"re,rad;re,rad;…"`.
pub fn parse_partition(spec: &str) -> Result<Vec<Sphere>> {
    spec.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let parts: Vec<&str> = item.split(',').map(str::trim).collect();
            let [re, rad] = parts.as_slice() else {
                return Err(Error::Parse(format!("sphere '{item}' must be 're,rad'")));
            };
            let re: f64 = re.parse().map_err(|_| Error::Parse(format!("bad real part in '{item}'")))?;
            let rad: f64 = rad.parse().map_err(|_| Error::Parse(format!("bad radius in '{item}'")))?;
            if !re.is_finite() || !(rad >= 0.0) || !rad.is_finite() {
                return Err(Error::Parse(format!("sphere '{item}' needs a finite real part and radius ≥ 0")));
            }
            Ok(Sphere::new(re, rad))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let m = QMatrix::from_rows(&[
            vec![Quaternion::new(1.0, 2.0, 3.0, 4.0), Quaternion::J],
            vec![Quaternion::ZERO, Quaternion::new(-0.5, 0.0, 1e-300, 7.0)],
        ])
        .unwrap();
        let text = serde_json::to_string(&matrix_to_json(&m)).unwrap();
        assert_eq!(matrix_from_str(&text).unwrap(), m);
    }

    #[test]
    fn errors_have_locations() {
        let err = matrix_from_str("{\"rows\": 1, \"cols\": 1, \"data\": [[[1, 2, 3]]]}").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        let err = matrix_from_str("{\"rows\": 2, \"cols\": 1, \"data\": [[[1, 2, 3, 4]], []]}").unwrap_err();
        assert!(err.to_string().contains("data[1]"), "{err}");
    }

    #[test]
    fn partitions() {
        let p = parse_partition("0,1; 3,0").unwrap();
        assert_eq!(p, vec![Sphere::new(0.0, 1.0), Sphere::new(3.0, 0.0)]);
        assert!(parse_partition("1;2").is_err());
        assert!(parse_partition("1,-2").is_err());
        assert!(parse_partition("").unwrap().is_empty());
    }
}
