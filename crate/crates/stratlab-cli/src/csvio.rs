use std::path::Path;

use crate::error::CliError;

/// 17 significant digits, so every f64 survives a write/read cycle.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus rows, written in one go so a failed run leaves no half file.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
        w.write_record(&self.header)
            .map_err(|e| CliError::io(path, e))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::io(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
        Ok(())
    }
}

/// A CSV file read back with its header checked against `expected`.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Loaded {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn floats(&self, name: &str) -> Result<Vec<f64>, String> {
        let c = self
            .column(name)
            .ok_or_else(|| format!("no column {name}"))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r[c].parse::<f64>()
                    .map_err(|_| format!("row {}: {name} = {:?} is not a number", i + 1, r[c]))
            })
            .collect()
    }

    pub fn strings(&self, name: &str) -> Result<Vec<String>, String> {
        let c = self
            .column(name)
            .ok_or_else(|| format!("no column {name}"))?;
        Ok(self.rows.iter().map(|r| r[c].clone()).collect())
    }
}

pub fn load(path: &Path, expected: &[&str]) -> Result<Loaded, String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| e.to_string())?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(str::to_string)
        .collect();
    if header != expected {
        return Err(format!("header {header:?}, expected {expected:?}"));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(Loaded { header, rows })
}
