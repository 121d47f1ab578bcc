//! Numeric CSV input and output.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A parsed numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub names: Option<Vec<String>>,
    pub values: Matrix,
}

impl Dataset {
    /// Keeps the given zero-based columns, in order.
    pub fn select(&self, columns: &[usize]) -> Result<Dataset> {
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.values.ncols()) {
            return Err(Error::Usage(format!(
                "column {} requested but the data have {} columns",
                bad + 1,
                self.values.ncols()
            )));
        }
        Ok(Dataset {
            names: self
                .names
                .as_ref()
                .map(|n| columns.iter().map(|&c| n[c].clone()).collect()),
            values: self.values.select_columns(columns)?,
        })
    }
}

/// Reads comma-separated numbers. A first row containing a non-numeric
/// field is taken as the header.
pub fn read_dataset(input: impl Read) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut names = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(idx + 1, |p| p.line() as usize),
            column: 0,
            message: e.to_string(),
        })?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if let Some(w) = width {
            if record.len() != w {
                return Err(Error::Parse {
                    line,
                    column: record.len().min(w) + 1,
                    message: format!("expected {w} fields, found {}", record.len()),
                });
            }
        }
        let parsed: Vec<std::result::Result<f64, usize>> = record
            .iter()
            .enumerate()
            .map(|(j, f)| f.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(j))
            .collect();
        if rows.is_empty() && names.is_none() && parsed.iter().any(|p| p.is_err()) {
            names = Some(record.iter().map(str::to_string).collect());
            width = Some(record.len());
            continue;
        }
        let mut row = Vec::with_capacity(parsed.len());
        for (j, p) in parsed.into_iter().enumerate() {
            match p {
                Ok(v) => row.push(v),
                Err(_) => {
                    return Err(Error::Parse {
                        line,
                        column: j + 1,
                        message: format!("'{}' is not a finite number", &record[j]),
                    })
                }
            }
        }
        width = Some(row.len());
        rows.push(row);
    }
    if rows.len() < 2 {
        return Err(Error::Parse {
            line: rows.len() + usize::from(names.is_some()),
            column: 0,
            message: format!("need at least 2 data rows, found {}", rows.len()),
        });
    }
    Ok(Dataset {
        names,
        values: Matrix::from_rows(&rows)?,
    })
}

/// Writes a matrix as CSV with a `u1,u2,...` header, using the shortest
/// representation that reads back to the same value.
pub fn write_matrix(out: impl Write, m: &Matrix) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record((1..=m.ncols()).map(|j| format!("u{j}")))
        .map_err(io)?;
    for row in m.rows() {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
