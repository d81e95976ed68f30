//! Output plumbing shared by the subcommands: format selection, float cell
//! formatting, and file-or-stdout writing.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    /// Aligned plain text; only the `table1` command supports it.
    Text,
}

/// Shortest round-trip decimal form, shared by CSV cells and JSON numbers.
pub fn cell(x: f64) -> String {
    format!("{x}")
}

pub fn cell_opt(x: Option<f64>) -> String {
    x.map(cell).unwrap_or_default()
}

/// Round to the 15 significant digits trajectory CSV files carry, so the
/// JSON rendering of a trajectory holds the same numbers as the CSV one.
pub fn round15(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.14e}").parse().unwrap_or(x)
    } else {
        x
    }
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Write `body` to the requested path, or stdout when none was given.
pub fn emit(out: &Option<PathBuf>, body: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, body),
        None => io::stdout().write_all(body.as_bytes()),
    }
}
