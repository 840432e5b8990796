//! File formats: CSV matrices and vectors with a header row, edge lists,
//! column-type files and JSON manifests.
//!
//! Non-integer values are written with 17 significant digits so a round
//! trip through a file is exact.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::latent_corr::ColumnType;
use crate::precision::EdgeSet;
use crate::simgen::{Design, Scenario, ScenarioTruth};

/// Formats a value exactly: integers plainly, everything else with 17
/// significant digits.
pub fn format_value(v: f64) -> String {
    if v.is_finite() && v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.16e}")
    }
}

/// Default column names `V1..Vd`.
pub fn default_header(d: usize) -> Vec<String> {
    (1..=d).map(|j| format!("V{j}")).collect()
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>, header: Option<&[String]>) -> Result<()> {
    let names = match header {
        Some(h) if h.len() == m.ncols() => h.to_vec(),
        Some(h) => {
            return Err(Error::Dimension(format!(
                "{} header names for {} columns",
                h.len(),
                m.ncols()
            )))
        }
        None => default_header(m.ncols()),
    };
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&names)?;
    for row in m.row_iter() {
        w.write_record(row.iter().map(|&v| format_value(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a numeric CSV with a header row.
pub fn read_matrix_csv(path: &Path) -> Result<(Vec<String>, DMatrix<f64>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    let d = header.len();
    let mut values = Vec::new();
    let mut rows = 0;
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != d {
            return Err(Error::Parse(format!(
                "{}: row {} has {} fields, expected {d}",
                path.display(),
                line + 1,
                rec.len()
            )));
        }
        for field in rec.iter() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::Parse(format!("{}: row {}: '{field}' is not a number", path.display(), line + 1))
            })?;
            values.push(v);
        }
        rows += 1;
    }
    Ok((header, DMatrix::from_row_slice(rows, d, &values)))
}

/// A single-column CSV with header `value`.
pub fn write_vector_csv(path: &Path, v: &[f64]) -> Result<()> {
    write_matrix_csv(path, &DMatrix::from_column_slice(v.len(), 1, v), Some(&["value".to_owned()]))
}

pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>> {
    let (_, m) = read_matrix_csv(path)?;
    if m.ncols() != 1 {
        return Err(Error::Dimension(format!("{}: expected one column, found {}", path.display(), m.ncols())));
    }
    Ok(m.column(0).iter().copied().collect())
}

/// Zero-based `i,j` pairs with `i < j`.
pub fn write_edges_csv(path: &Path, edges: &EdgeSet) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["i", "j"])?;
    for &(i, j) in edges.pairs() {
        w.write_record([i.to_string(), j.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_edges_csv(path: &Path) -> Result<EdgeSet> {
    let mut r = csv::Reader::from_path(path)?;
    let mut pairs = Vec::new();
    for rec in r.deserialize() {
        let (i, j): (usize, usize) = rec?;
        pairs.push((i, j));
    }
    EdgeSet::new(pairs)
}

/// Zero-based indices, one per line.
pub fn write_index_list(path: &Path, idx: &[usize]) -> Result<()> {
    let mut s = String::new();
    for i in idx {
        s.push_str(&i.to_string());
        s.push('\n');
    }
    fs::write(path, s)?;
    Ok(())
}

pub fn read_index_list(path: &Path) -> Result<Vec<usize>> {
    fs::read_to_string(path)?
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Parse(format!("{}: '{t}' is not an index", path.display()))))
        .collect()
}

/// Column types separated by commas or whitespace: `binary`/`b` or
/// `continuous`/`c`.
pub fn read_column_types(path: &Path) -> Result<Vec<ColumnType>> {
    fs::read_to_string(path)?
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| match t.to_ascii_lowercase().as_str() {
            "binary" | "b" => Ok(ColumnType::Binary),
            "continuous" | "c" => Ok(ColumnType::Continuous),
            other => Err(Error::Parse(format!("unknown column type '{other}'"))),
        })
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: Scenario,
    pub design: Design,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    /// Off-diagonal magnitude of the graph construction (graph design only).
    pub t: Option<f64>,
    pub edge_count: usize,
    pub mean_degree: f64,
    pub column_types: Vec<ColumnType>,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn new(truth: &ScenarioTruth, scenario: Scenario, n: usize, column_types: Vec<ColumnType>) -> Self {
        Self {
            scenario,
            design: truth.design,
            n,
            d: truth.d(),
            seed: truth.seed,
            t: truth.t,
            edge_count: truth.edges.len(),
            mean_degree: truth.mean_degree(),
            column_types,
            files: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip_exactly() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1.0, 0.0, -7.0, std::f64::consts::PI] {
            assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_value(1.0), "1");
    }

    #[test]
    fn matrix_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let m = DMatrix::from_row_slice(2, 3, &[0.1, 0.2, 1.0, -1e-17, 3.0, 0.7]);
        write_matrix_csv(&p, &m, None).unwrap();
        let (h, back) = read_matrix_csv(&p).unwrap();
        assert_eq!(h, vec!["V1", "V2", "V3"]);
        assert_eq!(back, m);
    }

    #[test]
    fn edges_and_types() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        let e = EdgeSet::new([(0, 3), (2, 1)]).unwrap();
        write_edges_csv(&p, &e).unwrap();
        assert_eq!(read_edges_csv(&p).unwrap(), e);
        let t = dir.path().join("types.txt");
        fs::write(&t, "binary, c\ncontinuous b").unwrap();
        assert_eq!(
            read_column_types(&t).unwrap(),
            vec![ColumnType::Binary, ColumnType::Continuous, ColumnType::Continuous, ColumnType::Binary]
        );
    }
}
