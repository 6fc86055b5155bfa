//! Tabular artifacts: CSV with `{:.17e}` numbers, and the same table as JSON.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;
use crate::tensor::Tensor3C;
use crate::{Error, Result};

const AXES: [char; 3] = ['x', 'y', 'z'];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.17e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Column names `{prefix}xx_re, {prefix}xx_im, …` in row-major order.
pub fn tensor_columns(prefix: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(18);
    for a in AXES {
        for b in AXES {
            out.push(format!("{prefix}{a}{b}_re"));
            out.push(format!("{prefix}{a}{b}_im"));
        }
    }
    out
}

pub fn tensor_cells(t: &Tensor3C) -> Vec<Cell> {
    let mut out = Vec::with_capacity(18);
    for i in 0..3 {
        for j in 0..3 {
            out.push(Cell::Num(t[(i, j)].re));
            out.push(Cell::Num(t[(i, j)].im));
        }
    }
    out
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

pub fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
    let csv_err = |e: csv::Error| Error::Csv(format!("{}: {e}", path.display()));
    w.write_record(&table.columns).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv)).map_err(csv_err)?;
    }
    w.flush().map_err(io(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(io(path))
}

/// Writes tables into one directory in the requested formats and remembers
/// every file it produced.
#[derive(Debug, Clone)]
pub struct ArtifactWriter {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
    pub written: Vec<PathBuf>,
}

impl ArtifactWriter {
    pub fn new(directory: &Path, formats: &[Format]) -> Result<Self> {
        std::fs::create_dir_all(directory).map_err(io(directory))?;
        Ok(Self { directory: directory.to_path_buf(), formats: formats.to_vec(), written: Vec::new() })
    }

    pub fn table(&mut self, stem: &str, table: &Table) -> Result<()> {
        for f in self.formats.clone() {
            let path = match f {
                Format::Csv => self.directory.join(format!("{stem}.csv")),
                Format::Json => self.directory.join(format!("{stem}.json")),
            };
            match f {
                Format::Csv => write_csv(&path, table)?,
                Format::Json => write_json(&path, table)?,
            }
            self.written.push(path);
        }
        Ok(())
    }
}
