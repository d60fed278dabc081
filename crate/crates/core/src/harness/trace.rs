//! CSV trace files: one header line, then one line per control step with
//! every field in fixed 6-decimal notation and `\n` line endings.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::run::TraceRow;
use crate::error::{Error, Result};

fn format_field(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_owned()
    } else {
        s
    }
}

/// Writes the trace to `out`, returning the number of bytes written.
pub fn emit_csv<W: Write>(rows: &[TraceRow], mut out: W) -> std::io::Result<usize> {
    let mut bytes = 0;
    let header = TraceRow::COLUMNS.join(",");
    out.write_all(header.as_bytes())?;
    out.write_all(b"\n")?;
    bytes += header.len() + 1;

    let mut line = String::with_capacity(256);
    for row in rows {
        line.clear();
        for (i, v) in row.to_fields().iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format_field(*v));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
        bytes += line.len();
    }
    out.flush()?;
    Ok(bytes)
}

pub fn write_csv_file(rows: &[TraceRow], path: impl AsRef<Path>) -> Result<usize> {
    let file = File::create(path.as_ref())?;
    Ok(emit_csv(rows, BufWriter::new(file))?)
}

/// Reads a trace written by [`emit_csv`]; the header must match exactly.
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| Error::TraceFormat(e.to_string()))?
        .clone();
    if header.iter().ne(TraceRow::COLUMNS.iter().copied()) {
        return Err(Error::TraceFormat(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::TraceFormat(e.to_string()))?;
        let mut fields = [0.0; 23];
        for (slot, raw) in fields.iter_mut().zip(record.iter()) {
            *slot = raw
                .trim()
                .parse()
                .map_err(|_| Error::TraceFormat(format!("row {}: bad number `{raw}`", i + 1)))?;
        }
        rows.push(TraceRow::from_fields(&fields));
    }
    Ok(rows)
}

pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    read_csv(File::open(path.as_ref())?)
}
