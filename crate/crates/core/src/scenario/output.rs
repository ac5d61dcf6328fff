//! CSV and JSON writers. Numbers use the shortest round-trip formatting,
//! so identical runs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{FracError, Result};

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{v:e}");
        }
        s.push('\n');
    }
    std::fs::write(path, s).map_err(|e| FracError::Io(format!("{}: {e}", path.display())))
}

pub fn write_json<S: Serialize + ?Sized>(path: &Path, value: &S) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| FracError::Io(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| FracError::Io(format!("{}: {e}", path.display())))
}
