//! Rendering of reports and tables as text, CSV or JSON.
//!
//! Floats are rounded to the requested number of significant digits and
//! then printed in shortest round-trip form, so output files are stable
//! byte for byte and parse back to exactly the printed value.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Number, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i128),
    /// Arbitrary-precision integer in decimal.
    Big(String),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i128)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

/// Rounds to `digits` significant digits.
pub fn round_to_digits(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", digits.saturating_sub(1), v)
        .parse()
        .expect("formatted float parses")
}

pub fn format_float(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:?}", round_to_digits(v, digits))
}

impl Value {
    fn render(&self, digits: usize) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Big(s) | Value::Str(s) => s.clone(),
            Value::Float(f) => format_float(*f, digits),
            Value::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self, digits: usize) -> Json {
        match self {
            Value::Int(i) => i64::try_from(*i).map_or_else(|_| Json::String(i.to_string()), Json::from),
            Value::Big(s) | Value::Str(s) => Json::String(s.clone()),
            Value::Float(f) => Number::from_f64(round_to_digits(*f, digits))
                .map_or_else(|| Json::String(format_float(*f, digits)), Json::Number),
            Value::Bool(b) => Json::Bool(*b),
        }
    }
}

/// Key/value report, rendered as `key=value` lines in text mode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub fields: Vec<(String, Value)>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn push(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.push((key.to_owned(), value.into()));
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

/// Rows with a fixed header plus `#` metadata lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            rows: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Report(Report),
    Table(Table),
    /// Free-form lines (path listings).
    Lines(Report, Vec<String>),
}

impl Document {
    pub fn render(&self, format: Format, digits: usize) -> String {
        match (self, format) {
            (Document::Report(r), Format::Text) => render_report_text(r, digits),
            (Document::Report(r), Format::Csv) => {
                let mut t = Table::new(&["key", "value"]);
                t.rows = r
                    .fields
                    .iter()
                    .map(|(k, v)| vec![Value::Str(k.clone()), v.clone()])
                    .collect();
                t.meta = r
                    .notes
                    .iter()
                    .map(|n| ("note".to_owned(), Value::Str(n.clone())))
                    .collect();
                render_table_csv(&t, digits)
            }
            (Document::Report(r), Format::Json) => pretty(report_json(r, digits)),
            (Document::Table(t), Format::Text | Format::Csv) => render_table_csv(t, digits),
            (Document::Table(t), Format::Json) => pretty(table_json(t, digits)),
            (Document::Lines(r, lines), Format::Text | Format::Csv) => {
                let mut out = String::new();
                for (k, v) in &r.fields {
                    let _ = writeln!(out, "# {k}={}", v.render(digits));
                }
                for n in &r.notes {
                    let _ = writeln!(out, "# {n}");
                }
                for l in lines {
                    let _ = writeln!(out, "{l}");
                }
                out
            }
            (Document::Lines(r, lines), Format::Json) => {
                let mut obj = report_json(r, digits);
                if let Json::Object(map) = &mut obj {
                    map.insert("paths".into(), lines.iter().cloned().map(Json::String).collect());
                }
                pretty(obj)
            }
        }
    }
}

fn pretty(v: Json) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn render_report_text(r: &Report, digits: usize) -> String {
    let mut out = String::new();
    for (k, v) in &r.fields {
        let _ = writeln!(out, "{k}={}", v.render(digits));
    }
    for n in &r.notes {
        let _ = writeln!(out, "# {n}");
    }
    out
}

fn report_json(r: &Report, digits: usize) -> Json {
    let mut map = Map::new();
    for (k, v) in &r.fields {
        map.insert(k.clone(), v.to_json(digits));
    }
    if !r.notes.is_empty() {
        map.insert("notes".into(), r.notes.iter().cloned().map(Json::String).collect());
    }
    Json::Object(map)
}

fn render_table_csv(t: &Table, digits: usize) -> String {
    let mut out = String::new();
    for (k, v) in &t.meta {
        let _ = writeln!(out, "# {k}={}", v.render(digits));
    }
    let _ = writeln!(out, "{}", t.columns.join(","));
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|v| v.render(digits)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

fn table_json(t: &Table, digits: usize) -> Json {
    let meta: Map<String, Json> = t.meta.iter().map(|(k, v)| (k.clone(), v.to_json(digits))).collect();
    let rows: Vec<Json> = t
        .rows
        .iter()
        .map(|row| {
            Json::Object(
                t.columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), v.to_json(digits)))
                    .collect(),
            )
        })
        .collect();
    let mut map = Map::new();
    map.insert("meta".into(), Json::Object(meta));
    map.insert("rows".into(), Json::Array(rows));
    Json::Object(map)
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
