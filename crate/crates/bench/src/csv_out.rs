//! CSV emission with a schema comment line and 17-significant-digit floats.

use std::io::Write;
use std::path::Path;

use crate::error::{BenchError, Result};

pub const SCHEMA_LINE: &str = "# schema=1";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A table of named float columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, w: impl Write) -> Result<()> {
        let mut w = w;
        writeln!(w, "{SCHEMA_LINE}").map_err(|e| BenchError::io("<csv>", e))?;
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|&v| fmt_f64(v)))?;
        }
        out.flush().map_err(|e| BenchError::io("<csv>", e))?;
        Ok(())
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
        }
        let f = std::fs::File::create(path).map_err(|e| BenchError::io(path, e))?;
        self.write_to(std::io::BufWriter::new(f))
    }

    /// Parse a table written by [`Table::write_to`].
    pub fn read_file(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        let body = text
            .strip_prefix(SCHEMA_LINE)
            .and_then(|t| t.strip_prefix('\n'))
            .ok_or_else(|| BenchError::BadArgs(format!("{} lacks `{SCHEMA_LINE}`", path.display())))?;
        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let header = rdr.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| BenchError::BadArgs(format!("bad float `{s}`: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok((header, rows))
    }
}
