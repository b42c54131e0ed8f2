//! File emission: JSON records, fixed-format CSV, and the output layout.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use varorbit::CheckReport64;

use crate::CliError;

/// Fixed 12-significant-digit rendering used in every CSV cell.
pub fn fmt12(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        x.to_string()
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn plots_dir(out: &Path) -> PathBuf {
    out.join("plots")
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    write_text(path, &text)
}

/// Writes `header` then `rows` with the csv crate's quoting rules.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Serializable mirror of a check report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub left: f64,
    pub right: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub tol: f64,
    pub pass: bool,
    pub notes: String,
}

impl From<CheckReport64> for CheckRow {
    fn from(r: CheckReport64) -> Self {
        Self {
            name: r.name,
            left: r.left,
            right: r.right,
            abs_dev: r.abs_dev,
            rel_dev: r.rel_dev,
            tol: r.tol,
            pass: r.pass,
            notes: r.notes,
        }
    }
}

pub const CHECK_HEADER: [&str; 9] = ["source", "name", "left", "right", "abs_dev", "rel_dev", "tol", "pass", "notes"];

impl CheckRow {
    pub fn csv_cells(&self, source: &str) -> Vec<String> {
        vec![
            source.to_string(),
            self.name.clone(),
            fmt12(self.left),
            fmt12(self.right),
            fmt12(self.abs_dev),
            fmt12(self.rel_dev),
            fmt12(self.tol),
            self.pass.to_string(),
            self.notes.clone(),
        ]
    }
}

/// One labeled formula value next to the number it is judged against.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub quantity: String,
    pub label: String,
    pub value: f64,
    pub reference_label: String,
    pub reference: f64,
    pub relative_gap: f64,
}

impl Comparison {
    pub fn new(quantity: &str, label: &str, value: f64, reference_label: &str, reference: f64) -> Self {
        Self {
            quantity: quantity.into(),
            label: label.into(),
            value,
            reference_label: reference_label.into(),
            reference,
            relative_gap: (value - reference).abs() / reference.abs(),
        }
    }

    pub fn csv_cells(&self) -> Vec<String> {
        vec![
            self.quantity.clone(),
            self.label.clone(),
            fmt12(self.value),
            self.reference_label.clone(),
            fmt12(self.reference),
            fmt12(self.relative_gap),
        ]
    }
}

pub const COMPARISON_HEADER: [&str; 6] = ["quantity", "label", "value", "reference_label", "reference", "relative_gap"];
