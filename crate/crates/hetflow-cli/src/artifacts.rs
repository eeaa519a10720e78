//! Deterministic artifact writing: CSV data files and JSON reports.
//!
//! Numbers are formatted with Rust's default float Display, which picks the
//! shortest decimal string that round-trips; identical data therefore
//! yields byte-identical files.

use std::fs;
use std::io::Write as _;
use std::path::Path;

/// Shortest round-trip decimal form of a float.
pub fn num(v: f64) -> String {
    format!("{v}")
}

/// Optional cell: empty string when absent.
pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Write a CSV file: header row then data rows, comma-separated, LF line
/// endings, no trailing blank line beyond the final LF.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> std::io::Result<()> {
    let mut buf = String::new();
    buf.push_str(&header.join(","));
    buf.push('\n');
    for row in rows {
        buf.push_str(&row.join(","));
        buf.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(buf.as_bytes())
}

/// Write a JSON value with stable formatting and a trailing newline.
pub fn write_json(path: &Path, value: &serde_json::Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("static JSON shape");
    text.push('\n');
    fs::write(path, text)
}

/// One row of the invariant table in summary.json: a named scalar and
/// whether it stayed within its bound. `value` is null for structural
/// checks that have no scalar.
pub fn check(name: &str, value: Option<f64>, ok: bool) -> serde_json::Value {
    serde_json::json!({ "name": name, "value": value, "ok": ok })
}
