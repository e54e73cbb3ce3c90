//! Result tables and their CSV / JSON encodings.
//!
//! CSV files start with `# key=value` metadata lines, followed by a header
//! row and the data rows.

use std::fmt;
use std::io::Write;

use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Num(x) => write!(f, "{x}"),
            Cell::Int(n) => write!(f, "{n}"),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> Self {
        ResultTable {
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric value at `(row, column)`, `None` for empty cells.
    pub fn value(&self, row: usize, column: &str) -> Option<f64> {
        let j = self.column(column)?;
        match self.rows.get(row)?.get(j)? {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            Cell::Empty => None,
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::runtime(format!("writing CSV: {e}"));
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}").map_err(io)?;
        }
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| CliError::runtime(format!("writing CSV: {e}"));
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))
                .map_err(csv_err)?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    pub fn to_json(&self) -> Value {
        let meta: Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|c| match c {
                            Cell::Num(x) => serde_json::Number::from_f64(*x)
                                .map(Value::Number)
                                .unwrap_or(Value::Null),
                            Cell::Int(n) => Value::from(*n),
                            Cell::Empty => Value::Null,
                        })
                        .collect(),
                )
            })
            .collect();
        serde_json::json!({
            "metadata": meta,
            "columns": self.columns,
            "rows": rows,
        })
    }

    /// Parses the CSV produced by [`ResultTable::write_csv`].
    pub fn parse_csv(text: &str) -> Result<Self, CliError> {
        let mut metadata = Vec::new();
        let mut body_start = 0;
        for line in text.lines() {
            match line.strip_prefix("# ") {
                Some(kv) => {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| CliError::runtime(format!("bad metadata line {line:?}")))?;
                    metadata.push((k.to_string(), v.to_string()));
                    body_start += line.len() + 1;
                }
                None => break,
            }
        }
        let mut r = csv::Reader::from_reader(&text.as_bytes()[body_start..]);
        let bad = |e: csv::Error| CliError::runtime(format!("parsing CSV: {e}"));
        let columns = r
            .headers()
            .map_err(bad)?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(bad)?;
            let row = rec
                .iter()
                .map(|s| {
                    if s.is_empty() {
                        Ok(Cell::Empty)
                    } else if let Ok(n) = s.parse::<u64>() {
                        Ok(Cell::Int(n))
                    } else {
                        s.parse::<f64>()
                            .map(Cell::Num)
                            .map_err(|_| CliError::runtime(format!("bad cell {s:?}")))
                    }
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(ResultTable {
            metadata,
            columns,
            rows,
        })
    }

    /// The CSV without its metadata lines.
    pub fn csv_body(&self) -> String {
        let mut t = self.clone();
        t.metadata.clear();
        t.to_csv_string()
    }
}
