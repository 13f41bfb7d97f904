//! Matrices as nested arrays of `[re, im]` pairs, row by row.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::gram::HermitianGram;
use crate::linalg::{CMat, C64};

pub fn to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// `cols` is needed to recover the shape of a matrix with zero rows.
pub fn from_rows(rows: &[Vec<[f64; 2]>], cols: usize) -> Result<CMat, String> {
    let mut m = CMat::zeros(rows.len(), cols);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != cols {
            return Err(format!("row {i} has {} entries, expected {cols}", r.len()));
        }
        for (j, v) in r.iter().enumerate() {
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(format!("entry ({i}, {j}) is not finite"));
            }
            m[(i, j)] = C64::new(v[0], v[1]);
        }
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        MatrixDoc { rows: m.nrows(), cols: m.ncols(), entries: to_rows(m) }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let doc = MatrixDoc::deserialize(d)?;
        if doc.entries.len() != doc.rows {
            return Err(D::Error::custom(format!(
                "declared {} rows, found {}",
                doc.rows,
                doc.entries.len()
            )));
        }
        from_rows(&doc.entries, doc.cols).map_err(D::Error::custom)
    }
}

pub mod gram {
    use super::*;

    pub fn serialize<S: Serializer>(g: &HermitianGram, s: S) -> Result<S::Ok, S::Error> {
        super::matrix::serialize(g.matrix(), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<HermitianGram, D::Error> {
        let m = super::matrix::deserialize(d)?;
        HermitianGram::new(m).map_err(D::Error::custom)
    }
}
