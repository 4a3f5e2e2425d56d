//! CSV tables and JSON summaries.
//!
//! Complex values become `name_re, name_im` column pairs. Floats are written
//! with the shortest round-trip representation, so identical inputs give
//! byte-identical files.

use std::fs::{self, File};
use std::io::Write;
use std::path::PathBuf;

use hatsigma_core::linalg::{CMat, C64};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Complex(C64),
    Text(&'static str),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<C64> for Cell {
    fn from(v: C64) -> Self {
        Cell::Complex(v)
    }
}

impl From<&'static str> for Cell {
    fn from(v: &'static str) -> Self {
        Cell::Text(v)
    }
}

/// Column kinds are fixed by the header; complex columns expand to two.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<(String, bool)>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    /// `columns` entries ending in `*` are complex.
    pub fn new(columns: &[&str]) -> Self {
        let columns = columns
            .iter()
            .map(|c| match c.strip_suffix('*') {
                Some(name) => (name.to_string(), true),
                None => (c.to_string(), false),
            })
            .collect();
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn header(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, complex) in &self.columns {
            if *complex {
                out.push(format!("{name}_re"));
                out.push(format!("{name}_im"));
            } else {
                out.push(name.clone());
            }
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header())?;
        for row in &self.rows {
            let mut rec: Vec<String> = Vec::new();
            for cell in row {
                match cell {
                    Cell::Int(v) => rec.push(v.to_string()),
                    Cell::Real(v) => rec.push(real(*v)),
                    Cell::Complex(z) => {
                        rec.push(real(z.re));
                        rec.push(real(z.im));
                    }
                    Cell::Text(t) => rec.push((*t).to_string()),
                }
            }
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }
}

fn real(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:e}")
    }
}

/// Matrix as CSV with columns `c0_re, c0_im, c1_re, …`.
pub fn matrix_table(m: &CMat) -> Table {
    let names: Vec<String> = (0..m.ncols()).map(|k| format!("c{k}*")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut t = Table::new(&refs);
    for i in 0..m.nrows() {
        t.push((0..m.ncols()).map(|k| Cell::Complex(m[(i, k)])).collect());
    }
    t
}

/// `[re, im]` for JSON summaries.
pub fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Output directory; created on first write.
#[derive(Debug, Clone)]
pub struct OutDir {
    root: Option<PathBuf>,
    written: Vec<PathBuf>,
}

impl OutDir {
    /// `None` discards artifacts (summaries still go to stdout).
    pub fn new(root: Option<PathBuf>) -> Self {
        Self { root, written: Vec::new() }
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn write(&mut self, name: &str, data: &[u8]) -> Result<()> {
        let Some(root) = &self.root else { return Ok(()) };
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        let path = root.join(name);
        let mut f = File::create(&path).map_err(|e| Error::io(&path, e))?;
        f.write_all(data).map_err(|e| Error::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<()> {
        self.write(name, table.to_csv()?.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}
