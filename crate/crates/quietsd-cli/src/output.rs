//! CSV and JSON writers plus small CSV readers for the subcommands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Full round-trip float formatting (17 significant digits) so reruns are
/// byte-identical and downstream parsers lose nothing.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Read a CSV whose header must match `columns` exactly; returns the rows
/// parsed as floats.
pub fn read_column_csv(path: &Path, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let expected = columns.join(",");
    if header.trim() != expected {
        bail!("expected header '{expected}', found '{header}'");
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            bail!(
                "row {} has {} fields, expected {}",
                i + 2,
                fields.len(),
                columns.len()
            );
        }
        let row = fields
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad value '{f}' in row {}", i + 2))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Pull one named column out of a `n,f,q,u,v,rho` trace CSV.
pub fn read_trace_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let names: Vec<&str> = header.trim().split(',').collect();
    let idx = names
        .iter()
        .position(|&n| n == column)
        .with_context(|| format!("column '{column}' not in header '{header}'"))?;
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let field = line
            .split(',')
            .nth(idx)
            .with_context(|| format!("row {} too short", i + 2))?;
        if field.trim().is_empty() {
            continue;
        }
        values.push(
            field
                .trim()
                .parse::<f64>()
                .with_context(|| format!("bad value '{field}' in row {}", i + 2))?,
        );
    }
    if values.is_empty() {
        bail!("column '{column}' of {} is empty", path.display());
    }
    Ok(values)
}
