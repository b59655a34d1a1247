//! Versioned CSV reports.
//!
//! Every file starts with three comment lines — the schema tag, the
//! producing version and a one-line JSON echo of the run configuration —
//! followed by an ordinary CSV table with a header row. Lines end in LF and
//! floats are written in shortest round-trip form, so equal inputs give
//! byte-identical files.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};

pub const CSV_SCHEMA: &str = "# hostlab-csv v1";

/// Write `rows` as a versioned CSV table.
pub fn write_csv<W: Write, R: Serialize>(out: W, version: &str, config: &serde_json::Value, rows: &[R]) -> Result<()> {
    let mut out = io::BufWriter::new(out);
    let config = serde_json::to_string(config).map_err(|e| Error::input(format!("config echo: {e}")))?;
    let head = format!("{CSV_SCHEMA}\n# version: {}\n# config: {config}\n", version.replace('\n', " "));
    out.write_all(head.as_bytes()).map_err(io_err)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Resource(format!("writing csv: {e}")))?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Split a report into its comment header and its CSV body.
pub fn split_header(text: &str) -> (Vec<&str>, String) {
    let mut header = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        if line.starts_with('#') && body.is_empty() {
            header.push(line);
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    (header, body)
}

fn io_err(e: io::Error) -> Error {
    Error::Resource(format!("writing report: {e}"))
}
