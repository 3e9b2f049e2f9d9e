//! Tabular reports with a metadata header, written as CSV or JSON.
//!
//! Numbers are written with 17 significant digits in both encodings so a CSV
//! and a JSON file from the same run carry identical values. Nothing
//! time-dependent is recorded; identical inputs give identical bytes.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Missing, Into::into)
    }
}

/// Full-precision text form shared by CSV and JSON.
pub fn format_full(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// Terminal form with four significant digits.
pub fn format_short(x: f64) -> String {
    if !x.is_finite() {
        return format_full(x);
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (3 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.3e}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format_full(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn short(&self) -> String {
        match self {
            Cell::Num(x) => format_short(*x),
            Cell::Missing => "-".into(),
            other => other.text(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => {
                Value::Number(format_full(*x).parse::<Number>().expect("formatted float is a JSON number"))
            }
            Cell::Num(x) => Value::String(format_full(*x)),
            Cell::Int(i) => Value::Number((*i).into()),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Missing => Value::Null,
        }
    }
}

/// Ordered key/value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(String, Cell)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.0.push((key.to_owned(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn json(&self) -> Value {
        Value::Object(self.0.iter().map(|(k, v)| (k.clone(), v.json())).collect::<Map<_, _>>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// A report: the resolved run configuration, scalar metadata and a table.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub kind: String,
    pub config: Record,
    pub meta: Record,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(kind: &str, config: Record, columns: &[&str]) -> Self {
        Self {
            kind: kind.to_owned(),
            config,
            meta: Record::new(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }

    /// A one-row report whose columns are the fields of `record`.
    pub fn single(kind: &str, config: Record, record: Record) -> Self {
        let (columns, row) = record.0.into_iter().unzip();
        Self { kind: kind.to_owned(), config, meta: Record::new(), columns, rows: vec![row] }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn to_string(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("reports are UTF-8")
    }

    fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# report={}", self.kind)?;
        for (k, v) in self.config.0.iter().chain(self.meta.0.iter()) {
            writeln!(out, "# {k}={}", v.text())?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.flush()
    }

    fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
            .collect();
        let mut doc = Map::new();
        doc.insert("report".into(), Value::String(self.kind.clone()));
        doc.insert("config".into(), self.config.json());
        doc.insert("meta".into(), self.meta.json());
        doc.insert("columns".into(), Value::Array(self.columns.iter().cloned().map(Value::String).collect()));
        doc.insert("rows".into(), Value::Array(rows));
        serde_json::to_writer_pretty(&mut out, &Value::Object(doc))?;
        writeln!(out)
    }

    /// Human-readable summary at reduced precision.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta.0 {
            let _ = writeln!(s, "{k}: {}", v.short());
        }
        if self.rows.len() == 1 {
            for (c, v) in self.columns.iter().zip(&self.rows[0]) {
                let _ = writeln!(s, "{c}: {}", v.short());
            }
        } else {
            let _ = writeln!(s, "{}", self.columns.join("\t"));
            for row in &self.rows {
                let _ = writeln!(s, "{}", row.iter().map(Cell::short).collect::<Vec<_>>().join("\t"));
            }
        }
        s
    }
}
