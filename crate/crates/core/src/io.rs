//! CSV matrices and JSON metric measure spaces.
//!
//! Matrices are comma-separated, one row per line. A first line that does not
//! parse as numbers is taken as a header of labels. Floats are written in the
//! shortest form that parses back to the same value, so output is
//! byte-deterministic and round-trips exactly.
//!
//! Spaces use `{"n": 3, "dist": [[…], …], "weights": […], "labels": […]}`.
//! `dist` may also be a flat row-major array of `n * n` numbers; `weights`
//! defaults to uniform and `labels` to `"0"`, `"1"`, ….

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{validate_dissimilarity, DiscreteMeasure, MetricMeasureSpace};

/// Shortest round-trip decimal form of `x`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// A matrix read from CSV, with the header row if there was one.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvMatrix {
    pub matrix: DMatrix<f64>,
    pub header: Option<Vec<String>>,
}

/// Parses a numeric CSV matrix.
pub fn read_matrix_csv<R: Read>(reader: R) -> Result<CsvMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(row) => {
                if let Some(first) = rows.first() {
                    if row.len() != first.len() {
                        return Err(Error::Parse {
                            line,
                            message: format!(
                                "expected {} fields, found {}",
                                first.len(),
                                row.len()
                            ),
                        });
                    }
                }
                rows.push(row);
            }
            Err(_) if line == 1 => {
                header = Some(record.iter().map(str::to_string).collect());
            }
            Err(e) => {
                let field = record
                    .iter()
                    .find(|f| f.parse::<f64>().is_err())
                    .unwrap_or_default();
                return Err(Error::Parse {
                    line,
                    message: format!("{field:?} is not a number ({e})"),
                });
            }
        }
    }
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(h) = &header {
        if !rows.is_empty() && h.len() != cols {
            return Err(Error::Parse {
                line: 1,
                message: format!("header has {} fields but rows have {cols}", h.len()),
            });
        }
    }
    let matrix = DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]);
    Ok(CsvMatrix { matrix, header })
}

pub fn read_matrix_csv_path(path: impl AsRef<Path>) -> Result<CsvMatrix> {
    read_matrix_csv(File::open(path)?)
}

/// Writes `m` as CSV, preceded by `header` when given.
pub fn write_matrix_csv<W: Write>(
    mut w: W,
    m: &DMatrix<f64>,
    header: Option<&[String]>,
) -> Result<()> {
    w.write_all(matrix_csv_string(m, header).as_bytes())?;
    Ok(())
}

/// [`write_matrix_csv`] into a string.
pub fn matrix_csv_string(m: &DMatrix<f64>, header: Option<&[String]>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        out.push_str(&h.join(","));
        out.push('\n');
    }
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| format_float(m[(r, c)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum DistLayout {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceFile {
    n: usize,
    dist: DistLayout,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

/// Parses and validates a space from JSON.
pub fn read_space_json(text: &str) -> Result<MetricMeasureSpace> {
    let file: SpaceFile = serde_json::from_str(text)?;
    let n = file.n;
    let matrix = match file.dist {
        DistLayout::Rows(rows) => {
            if rows.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: rows.len(),
                });
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::DimensionMismatch {
                        index: i,
                        expected: n,
                        got: row.len(),
                    });
                }
            }
            DMatrix::from_fn(n, n, |r, c| rows[r][c])
        }
        DistLayout::Flat(flat) => {
            if flat.len() != n * n {
                return Err(Error::LengthMismatch {
                    expected: n * n,
                    got: flat.len(),
                });
            }
            DMatrix::from_row_slice(n, n, &flat)
        }
    };
    let dist = validate_dissimilarity(matrix)?;
    let measure = match file.weights {
        Some(w) => DiscreteMeasure::new(w)?,
        None => DiscreteMeasure::uniform(n),
    };
    let labels = file
        .labels
        .unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
    MetricMeasureSpace::new(labels, dist, measure)
}

pub fn read_space_json_path(path: impl AsRef<Path>) -> Result<MetricMeasureSpace> {
    read_space_json(&std::fs::read_to_string(path)?)
}

/// Serializes a space with nested `dist` rows.
pub fn write_space_json(space: &MetricMeasureSpace) -> Result<String> {
    let file = SpaceFile {
        n: space.len(),
        dist: DistLayout::Rows(space.dist().to_rows()),
        weights: Some(space.measure().weights().to_vec()),
        labels: Some(space.labels().to_vec()),
    };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}
