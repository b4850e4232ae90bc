//! Tables written as CSV with a `#` metadata header, or as JSON with the
//! same content.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u8> for Cell {
    fn from(x: u8) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// 17 significant digits: every finite `f64` round-trips.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(format_float(*x)),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }
}

pub struct Table {
    pub command: String,
    pub config: Map<String, Value>,
    /// (name, unit)
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, config: Map<String, Value>, columns: Vec<(&'static str, &'static str)>) -> Self {
        Table {
            command: command.to_owned(),
            config,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(c, _)| *c == name)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)
            }
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "# qsm {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# config: {}", Value::Object(self.config.clone()))?;
        let units: Vec<String> = self.columns.iter().map(|(c, u)| format!("{c} [{u}]")).collect();
        writeln!(out, "# units: {}", units.join(", "))?;
        let names: Vec<&str> = self.columns.iter().map(|(c, _)| *c).collect();
        writeln!(out, "{}", names.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|((c, _), cell)| (c.to_string(), cell.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let units: Map<String, Value> = self.columns.iter().map(|(c, u)| (c.to_string(), json!(u))).collect();
        json!({
            "tool": "qsm",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": Value::Object(self.config.clone()),
            "columns": self.columns.iter().map(|(c, _)| *c).collect::<Vec<_>>(),
            "units": units,
            "rows": rows,
        })
    }
}
