//! Row-oriented output: json-lines (one object per row, keys sorted) and
//! RFC-4180 CSV with a header row. Rows are plain `serde_json` maps so both
//! formats render from the same data; a fixed `schema_version` and the tool
//! version ride along on every row.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use crate::CliError;

pub const SCHEMA_VERSION: u64 = 1;

pub type Row = Map<String, Value>;

/// Starts a row carrying the schema version, tool version, and command name.
pub fn base_row(command: &str) -> Row {
    let mut row = Map::new();
    row.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    row.insert(
        "tool_version".into(),
        Value::from(env!("CARGO_PKG_VERSION")),
    );
    row.insert("command".into(), Value::from(command));
    row
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// One JSON object per line.
    JsonLines,
    /// RFC-4180 CSV with a header row.
    Csv,
}

fn open_sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::Config(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Writes the rows in order; identical rows yield byte-identical output.
pub fn write_rows(rows: &[Row], format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let mut sink = open_sink(out)?;
    match format {
        Format::JsonLines => {
            for row in rows {
                serde_json::to_writer(&mut sink, row)
                    .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))?;
                sink.write_all(b"\n")
                    .map_err(|e| CliError::Internal(format!("write failed: {e}")))?;
            }
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(sink);
            if let Some(first) = rows.first() {
                let header: Vec<&str> = first.keys().map(String::as_str).collect();
                writer
                    .write_record(&header)
                    .map_err(|e| CliError::Internal(format!("csv write failed: {e}")))?;
                for row in rows {
                    if row.len() != first.len() || !row.keys().eq(first.keys()) {
                        return Err(CliError::Internal(
                            "csv rows must share one schema".into(),
                        ));
                    }
                    let record: Vec<String> = row.values().map(csv_cell).collect();
                    writer
                        .write_record(&record)
                        .map_err(|e| CliError::Internal(format!("csv write failed: {e}")))?;
                }
            }
            writer
                .flush()
                .map_err(|e| CliError::Internal(format!("csv flush failed: {e}")))?;
        }
    }
    Ok(())
}

/// Scalar cells print bare, structured cells print as JSON text (the csv
/// layer applies RFC-4180 quoting as needed).
fn csv_cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}
