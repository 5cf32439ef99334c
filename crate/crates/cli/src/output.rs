//! Collected output files, written in one pass by a single writer, and the
//! aligned plain-text rendering of tables.

use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Files produced by a command, kept in memory until [`Outputs::commit`].
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    /// Adds `name.csv` and its text rendering `name.txt`.
    pub fn add_table(&mut self, name: &str, table: &Table, header: &[String]) -> CliResult<()> {
        self.add(format!("{name}.csv"), table.to_csv(header)?);
        self.add(format!("{name}.txt"), table.to_text().into_bytes());
        Ok(())
    }

    /// Writes every file into `dir`, each through a temporary file and a
    /// rename so readers never see a partial file.
    pub fn commit(self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in self.files {
            let path = dir.join(&name);
            let tmp = dir.join(format!(".{name}.tmp"));
            std::fs::write(&tmp, &bytes).map_err(|e| CliError::io(&tmp, e))?;
            std::fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// A rectangular table of strings with a schema name.
#[derive(Debug, Clone)]
pub struct Table {
    pub schema: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(schema: &'static str, columns: &[&str]) -> Self {
        Self {
            schema,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, header: &[String]) -> CliResult<Vec<u8>> {
        let mut buf = Vec::new();
        recmin::export::write_comment_header(&mut buf, self.schema, header)?;
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| CliError::Internal(e.to_string()))?;
        drop(w);
        Ok(buf)
    }

    /// Columns padded to equal width; numbers right-aligned.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| {
                    let numeric = c.trim_end_matches('*').parse::<f64>().is_ok();
                    if numeric {
                        format!("{c:>w$}")
                    } else {
                        format!("{c:<w$}")
                    }
                })
                .collect();
            parts.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.columns);
        out.push('\n');
        out.push_str(
            &widths
                .iter()
                .map(|&w| "-".repeat(w))
                .collect::<Vec<_>>()
                .join("  "),
        );
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
            out.push('\n');
        }
        out
    }
}

pub fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

/// Full-precision float for machine-readable columns.
pub fn num(v: f64) -> String {
    v.to_string()
}

pub fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
