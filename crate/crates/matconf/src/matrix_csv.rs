//! Square matrices with missing entries as comma-separated text.
//!
//! Each of the `N` lines holds `N` fields. An empty field or `NA` marks a
//! missing entry. Mirrored entries may differ by at most [`SYMMETRY_TOLERANCE`]
//! and are replaced by their average.

use std::io::{Read, Write};
use std::path::Path;

use matconf_core::{relabel_target, ObservedMatrix, Permutation, Square};

/// Largest accepted gap between `A(i, j)` and `A(j, i)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Locations are 1-based in messages.
#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("line {line}, column {col}: cannot parse {field:?} as a number")]
    Parse {
        line: usize,
        col: usize,
        field: String,
    },
    #[error("line {line}, column {col}: value is not finite")]
    NonFinite { line: usize, col: usize },
    #[error("line {line} has {got} fields, expected {expected}")]
    Ragged {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("matrix has {rows} rows but {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("entries ({row}, {col}) and ({col}, {row}) differ by {gap:e}, beyond the symmetry tolerance")]
    Asymmetric { row: usize, col: usize, gap: f64 },
    #[error("entry ({row}, {col}) is missing but ({col}, {row}) is not")]
    AsymmetricMissing { row: usize, col: usize },
    #[error("line {line}: {source}")]
    Read { line: usize, source: csv::Error },
    #[error("writing matrix: {0}")]
    Write(csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A parsed square matrix; `None` marks a missing entry.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixData {
    order: usize,
    entries: Vec<Option<f64>>,
}

impl MatrixData {
    pub fn new(order: usize, entries: Vec<Option<f64>>) -> Self {
        assert_eq!(
            entries.len(),
            order * order,
            "entry count must be order squared"
        );
        Self { order, entries }
    }

    /// All entries of `m`, none missing.
    pub fn from_square(m: &Square) -> Self {
        Self::new(m.order(), m.as_slice().iter().map(|&v| Some(v)).collect())
    }

    /// Entries of `m` with `None` wherever `missing(i, j)` holds.
    pub fn from_square_masked(m: &Square, missing: impl Fn(usize, usize) -> bool) -> Self {
        let order = m.order();
        let entries = (0..order * order)
            .map(|k| (!missing(k / order, k % order)).then(|| m.get(k / order, k % order)))
            .collect();
        Self::new(order, entries)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i * self.order + j]
    }

    pub fn entries(&self) -> &[Option<f64>] {
        &self.entries
    }

    /// The observation predicting entry `(row, col)` (0-based), relabelled so
    /// that it sits in the canonical target position.
    ///
    /// The returned permutation maps original indices to relabelled ones.
    pub fn to_observed(
        &self,
        bound: f64,
        row: usize,
        col: usize,
    ) -> matconf_core::Result<(ObservedMatrix, Permutation)> {
        let obs =
            ObservedMatrix::from_entries(self.order, self.entries.clone(), bound, (row, col))?;
        relabel_target(&obs, row, col)
    }
}

pub fn read_matrix_path(path: &Path) -> Result<MatrixData, CsvError> {
    read_matrix(std::fs::File::open(path)?)
}

pub fn read_matrix<R: Read>(reader: R) -> Result<MatrixData, CsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let record = record.map_err(|source| CsvError::Read {
            line: idx + 1,
            source,
        })?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| parse_field(field, line, c + 1))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CsvError::Ragged {
                    line,
                    expected: first.len(),
                    got: row.len(),
                });
            }
        }
        rows.push(row);
    }
    let order = rows.len();
    if order == 0 {
        return Err(CsvError::Empty);
    }
    if rows[0].len() != order {
        return Err(CsvError::NotSquare {
            rows: order,
            cols: rows[0].len(),
        });
    }
    let mut entries: Vec<Option<f64>> = rows.into_iter().flatten().collect();
    for i in 0..order {
        for j in 0..i {
            match (entries[i * order + j], entries[j * order + i]) {
                (Some(a), Some(b)) => {
                    let gap = (a - b).abs();
                    if gap > SYMMETRY_TOLERANCE {
                        return Err(CsvError::Asymmetric {
                            row: i + 1,
                            col: j + 1,
                            gap,
                        });
                    }
                    let mid = 0.5 * (a + b);
                    entries[i * order + j] = Some(mid);
                    entries[j * order + i] = Some(mid);
                }
                (None, None) => {}
                _ => {
                    return Err(CsvError::AsymmetricMissing {
                        row: i + 1,
                        col: j + 1,
                    })
                }
            }
        }
    }
    Ok(MatrixData { order, entries })
}

fn parse_field(field: &str, line: usize, col: usize) -> Result<Option<f64>, CsvError> {
    if field.is_empty() || field.eq_ignore_ascii_case("na") {
        return Ok(None);
    }
    let v: f64 = field.parse().map_err(|_| CsvError::Parse {
        line,
        col,
        field: field.to_owned(),
    })?;
    if !v.is_finite() {
        return Err(CsvError::NonFinite { line, col });
    }
    Ok(Some(v))
}

/// Writes `NA` for missing entries and the shortest exact decimal otherwise.
pub fn write_matrix<W: Write>(data: &MatrixData, writer: W) -> Result<(), CsvError> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    for i in 0..data.order {
        let fields = (0..data.order).map(|j| match data.get(i, j) {
            Some(v) => v.to_string(),
            None => "NA".to_owned(),
        });
        wtr.write_record(fields).map_err(CsvError::Write)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_matrix_path(data: &MatrixData, path: &Path) -> Result<(), CsvError> {
    write_matrix(data, std::fs::File::create(path)?)
}
