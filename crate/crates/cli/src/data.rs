//! CSV ingestion for user-supplied datasets and loading of either source.

use std::path::Path;

use faircca_core::{DataMatrix, SynthConfig};

use crate::config::{CsvPaths, DataSource};
use crate::error::{CliError, Result};

/// One loaded dataset: two views, groups and labels in {1, 2}.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: DataMatrix,
    pub y: DataMatrix,
    pub z: Vec<u8>,
    pub labels: Vec<u8>,
}

impl Dataset {
    pub fn n_samples(&self) -> usize {
        self.z.len()
    }
}

pub fn load_source(source: &DataSource) -> Result<Dataset> {
    match source {
        DataSource::Synth(config) => from_synth(config),
        DataSource::Csv(paths) => ingest_csv(paths),
    }
}

pub fn from_synth(config: &SynthConfig) -> Result<Dataset> {
    let data = faircca_core::generate_dataset(config)?;
    Ok(Dataset {
        x: data.x,
        y: data.y,
        z: data.z,
        labels: data.labels,
    })
}

/// Reads x.csv / y.csv (header row, float cells) and z.csv / labels.csv
/// (single column). The two distinct group/label values are mapped to
/// {1, 2} in ascending order.
pub fn ingest_csv(paths: &CsvPaths) -> Result<Dataset> {
    let x = read_matrix(&paths.x)?;
    let y = read_matrix(&paths.y)?;
    let z_raw = read_column(&paths.z)?;
    let labels_raw = read_column(&paths.labels)?;
    let n = x.n_samples();
    for (name, len) in [
        ("y.csv", y.n_samples()),
        ("z", z_raw.len()),
        ("labels", labels_raw.len()),
    ] {
        if len != n {
            return Err(CliError::Data(format!(
                "row count mismatch: x has {n} rows but {name} has {len}"
            )));
        }
    }
    let z = map_binary(&z_raw, &paths.z)?;
    let labels = map_binary(&labels_raw, &paths.labels)?;
    Ok(Dataset { x, y, z, labels })
}

/// Reads a float matrix CSV (header row skipped).
pub fn read_matrix_csv(path: &Path) -> Result<DataMatrix> {
    read_matrix(path)
}

/// Reads a single-column CSV and maps its two distinct values to {1, 2}.
pub fn read_binary_column(path: &Path) -> Result<Vec<u8>> {
    let raw = read_column(path)?;
    map_binary(&raw, path)
}

fn read_matrix(path: &Path) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let mut row = Vec::with_capacity(record.len());
        for (col_idx, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| CliError::Parse {
                file: path.display().to_string(),
                row: row_idx + 2, // 1-based, counting the header line
                col: col_idx + 1,
                message: format!("'{field}' is not a decimal float"),
            })?;
            row.push(value);
        }
        if !rows.is_empty() && row.len() != rows[0].len() {
            return Err(CliError::Data(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                row_idx + 2,
                row.len(),
                rows[0].len()
            )));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    DataMatrix::from_rows(&rows).map_err(CliError::Core)
}

fn read_column(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        if record.len() != 1 {
            return Err(CliError::Data(format!(
                "{}: expected a single column, row {} has {} fields",
                path.display(),
                row_idx + 2,
                record.len()
            )));
        }
        let field = record.get(0).unwrap();
        let value: f64 = field.parse().map_err(|_| CliError::Parse {
            file: path.display().to_string(),
            row: row_idx + 2,
            col: 1,
            message: format!("'{field}' is not numeric"),
        })?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    Ok(values)
}

fn map_binary(values: &[f64], path: &Path) -> Result<Vec<u8>> {
    let mut distinct: Vec<f64> = Vec::new();
    for v in values {
        if !distinct.iter().any(|d| d == v) {
            distinct.push(*v);
        }
    }
    if distinct.len() != 2 {
        return Err(CliError::Data(format!(
            "{}: expected exactly two distinct values, found {}",
            path.display(),
            distinct.len()
        )));
    }
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(values
        .iter()
        .map(|v| if *v == distinct[0] { 1 } else { 2 })
        .collect())
}
