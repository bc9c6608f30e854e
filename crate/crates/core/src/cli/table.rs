//! Row-oriented reports rendered as CSV or JSON Lines with identical columns.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format {s:?}"))),
        }
    }
}

/// A report: fixed column list, one `Value` per cell.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record. The first record fixes the column order; later
    /// records must carry the same keys in the same order.
    pub fn push(&mut self, record: Vec<(String, Value)>) {
        if self.columns.is_empty() && self.rows.is_empty() {
            self.columns = record.iter().map(|(k, _)| k.clone()).collect();
        }
        assert!(
            record.len() == self.columns.len()
                && record.iter().zip(&self.columns).all(|((k, _), c)| k == c),
            "record columns differ from the table header"
        );
        self.rows.push(record.into_iter().map(|(_, v)| v).collect());
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn get(&self, row: usize, column: &str) -> Option<&Value> {
        self.column_index(column).map(|i| &self.rows[row][i])
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_jsonl(out),
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.write(&mut buf, format)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Parse(format!("csv output: {e}"));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text)).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Parse(format!("csv output: {e}")))
    }

    fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for row in &self.rows {
            let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().cloned()).collect();
            serde_json::to_writer(&mut out, &obj).map_err(|e| Error::Parse(e.to_string()))?;
            out.write_all(b"\n").map_err(|e| Error::Parse(e.to_string()))?;
        }
        Ok(())
    }

    /// Reads back a CSV written by [`Table::write`]. Cells come back as
    /// strings, except empty cells which become `null`.
    pub fn read_csv(text: &str) -> Result<Table> {
        let io = |e: csv::Error| Error::Parse(format!("csv input: {e}"));
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> = rdr.headers().map_err(io)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(io)?;
            rows.push(
                rec.iter()
                    .map(|c| if c.is_empty() { Value::Null } else { Value::String(c.to_string()) })
                    .collect(),
            );
        }
        Ok(Table { columns, rows })
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Numeric view of a cell, whether it holds a number or its CSV text.
pub fn cell_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// Shorthand for building records.
pub fn col(name: &str, v: impl Into<Value>) -> (String, Value) {
    (name.to_string(), v.into())
}
