//! CSV and JSON emission.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::statevec::format_float;

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// A row that knows its CSV header and fields.
pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn csv_string<R: CsvRow>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(R::HEADER).map_err(io_err)?;
    for r in rows {
        w.write_record(r.fields()).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(io_err)?;
    String::from_utf8(bytes).map_err(io_err)
}

pub fn float(x: f64) -> String {
    format_float(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format '{other}' (expected csv or json)"))),
        }
    }
}

/// `out.csv` → `out.summary.json`.
pub fn summary_path(path: &Path) -> PathBuf {
    path.with_extension("summary.json")
}

#[derive(Serialize)]
struct Document<'a, S: Serialize, R: Serialize> {
    summary: &'a S,
    rows: &'a [R],
}

/// Writes the run to `out` (stdout when `None`).
///
/// CSV output to a file also drops the JSON summary beside it. JSON output
/// is a single document holding the summary and the rows.
pub fn emit<R, S>(rows: &[R], summary: &S, format: Format, out: Option<&Path>) -> Result<()>
where
    R: CsvRow + Serialize,
    S: Serialize,
{
    let body = match format {
        Format::Csv => csv_string(rows)?,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Document { summary, rows }).map_err(io_err)?;
            s.push('\n');
            s
        }
    };
    match out {
        Some(path) => {
            fs::write(path, &body).map_err(io_err)?;
            if format == Format::Csv {
                let mut s = serde_json::to_string_pretty(summary).map_err(io_err)?;
                s.push('\n');
                fs::write(summary_path(path), s).map_err(io_err)?;
            }
        }
        None => io::stdout().lock().write_all(body.as_bytes()).map_err(io_err)?,
    }
    Ok(())
}
