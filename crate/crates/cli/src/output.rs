//! Writers for tables and JSON documents. Every float is printed with 17
//! significant digits so that it reads back to the same double.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::failure::Failure;

pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// JSON formatter that prints floats like [`float`].
struct ExactFloats;

impl serde_json::ser::Formatter for ExactFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(float(value).as_bytes())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats);
    value.serialize(&mut ser).expect("in-memory serialisation cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Numeric table with named columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| float(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => to_json(self),
        }
    }
}

/// Sends the main document to `path` (or stdout) and the human summary to
/// stdout when a file was written, stderr otherwise.
pub fn emit(path: Option<&Path>, document: &str, summary: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, document).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))?;
            if !summary.is_empty() {
                print!("{summary}");
            }
        }
        None => {
            if !summary.is_empty() {
                eprint!("{summary}");
            }
            io::stdout().write_all(document.as_bytes())?;
        }
    }
    Ok(())
}
