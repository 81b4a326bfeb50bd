//! Output helpers: atomic file writes and CSV formatting.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Writes `contents` to a temporary file next to `path`, then renames it
/// into place so readers never observe a truncated file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_json<T: serde::Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// Header plus rows, comma separated, `\n` line endings.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Shortest decimal that round-trips to the same `f64`, switching to
/// exponent notation for very small or very large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
