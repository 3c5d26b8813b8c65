//! Deterministic text formatting for data files.
//!
//! All floating-point output goes through [`fmt_f64`] so that a fixed config
//! and seed produce byte-identical CSV/JSON across runs: 17 significant
//! digits round-trip every f64 exactly and leave nothing to locale or
//! shortest-representation heuristics.

/// Fixed 17-significant-digit scientific form, e.g. `2.5000000000000000e-1`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes rows of already-formatted fields as CSV under a header.
pub fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
