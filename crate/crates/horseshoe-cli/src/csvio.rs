//! Minimal CSV plumbing: one input shape (a single `y` column) and
//! plain-text writers.
//!
//! Floats are written with Rust's default `Display`, which is the
//! shortest string that round-trips the exact value. Combined with the
//! deterministic numerics underneath, equal flags give byte-equal files.

use crate::Failure;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Reads a CSV whose single column `y` holds finite numbers. Line
/// numbers in errors are 1-based; `#` lines and blank lines are skipped.
pub fn read_y_column(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "y" {
                return Err(Failure::Usage(format!(
                    "{}:{}: expected header line 'y', found '{line}'",
                    path.display(),
                    idx + 1
                )));
            }
            saw_header = true;
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            Failure::Usage(format!(
                "{}:{}: cannot parse '{line}' as a number",
                path.display(),
                idx + 1
            ))
        })?;
        if !v.is_finite() {
            return Err(Failure::Usage(format!(
                "{}:{}: non-finite observation {v}",
                path.display(),
                idx + 1
            )));
        }
        values.push(v);
    }
    if !saw_header {
        return Err(Failure::Usage(format!("{}: missing header line 'y'", path.display())));
    }
    if values.is_empty() {
        return Err(Failure::Usage(format!("{}: no data rows", path.display())));
    }
    Ok(values)
}

/// Accumulates CSV text; all field content must already be comma-free.
pub struct CsvWriter {
    buf: String,
}

impl CsvWriter {
    pub fn new() -> Self {
        Self { buf: String::new() }
    }

    pub fn line(&mut self, text: &str) {
        debug_assert!(!text.ends_with('\n'));
        let _ = writeln!(self.buf, "{text}");
    }

    pub fn row(&mut self, fields: &[&dyn std::fmt::Display]) {
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            let _ = write!(self.buf, "{f}");
        }
        self.buf.push('\n');
    }

    pub fn write_to(self, path: &Path) -> Result<(), Failure> {
        fs::write(path, self.buf)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
    }
}
