use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::files::read_text;

/// A small CSV file: header plus rows of raw fields. The files written by
/// this tool never quote or embed commas.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> CliResult<Self> {
        Self::parse(&read_text(path)?).map_err(|m| CliError::input(path.display().to_string(), m))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or("empty file")?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
            if row.len() != header.len() {
                return Err(format!("row {} has {} fields, expected {}", i + 2, row.len(), header.len()));
            }
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize, String> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| format!("missing column {name:?}"))
    }

    /// Numeric column; empty fields become NaN.
    pub fn floats(&self, name: &str) -> Result<Vec<f64>, String> {
        let c = self.column(name)?;
        self.rows
            .iter()
            .map(|r| {
                let f = &r[c];
                if f.is_empty() {
                    Ok(f64::NAN)
                } else {
                    f.parse().map_err(|_| format!("{name}: not a number: {f:?}"))
                }
            })
            .collect()
    }

    pub fn strings(&self, name: &str) -> Result<Vec<String>, String> {
        let c = self.column(name)?;
        Ok(self.rows.iter().map(|r| r[c].clone()).collect())
    }

    /// Fixed-width text rendering with the fields as written.
    pub fn to_text(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| {
                self.rows
                    .iter()
                    .map(|r| r[c].len())
                    .chain(std::iter::once(self.header[c].len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |fields: &[String]| {
            fields
                .iter()
                .zip(&widths)
                .map(|(f, w)| format!("{f:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let mut out = line(&self.header);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}
