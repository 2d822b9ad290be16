//! Rendering of command results: a versioned JSON document, CSV rows or an
//! aligned text table.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use num_rational::BigRational;
use serde_json::{Map, Value};

/// Version of the JSON layout.
pub const SCHEMA: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// A command result: top-level JSON fields plus an optional table of rows
/// (emitted under "rows" in JSON, and as the body of CSV/pretty output).
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub fields: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, fields: Map::new(), columns: Vec::new(), rows: Vec::new() }
    }

    pub fn field(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn columns(&mut self, cols: &[&str]) -> &mut Self {
        self.columns = cols.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn row(&mut self, values: Vec<Value>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
    }

    /// The JSON document: schema, command, optional timestamp, fields, rows.
    pub fn to_json(&self, timestamp: bool) -> Value {
        let mut doc = Map::new();
        doc.insert("schema".into(), SCHEMA.into());
        doc.insert("command".into(), self.command.into());
        if timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            doc.insert("timestamp".into(), secs.into());
        }
        for (k, v) in &self.fields {
            doc.insert(k.clone(), v.clone());
        }
        if !self.columns.is_empty() {
            let rows = self
                .rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> = self.columns.iter().cloned().zip(r.iter().cloned()).collect();
                    Value::Object(obj)
                })
                .collect();
            doc.insert("rows".into(), Value::Array(rows));
        }
        Value::Object(doc)
    }

    pub fn write(&self, format: Format, timestamp: bool, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                let s = serde_json::to_string_pretty(&self.to_json(timestamp)).expect("JSON values serialise");
                writeln!(out, "{s}")
            }
            Format::Csv => self.write_csv(out),
            Format::Pretty => self.write_pretty(out),
        }
    }

    /// Rows as CSV; a command without rows becomes a single row of its fields.
    fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let (cols, rows) = self.flat();
        w.write_record(&cols)?;
        for r in rows {
            w.write_record(r.iter().map(cell))?;
        }
        w.flush()
    }

    fn write_pretty(&self, out: &mut impl Write) -> std::io::Result<()> {
        for (k, v) in &self.fields {
            if !v.is_array() && !v.is_object() {
                writeln!(out, "{k}: {}", short(&cell(v)))?;
            }
        }
        if self.columns.is_empty() {
            return Ok(());
        }
        writeln!(out)?;
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(|v| short(&cell(v))).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|i| cells.iter().map(|r| r[i].chars().count()).chain([self.columns[i].len()]).max().unwrap_or(0))
            .collect();
        let line = |vals: Vec<&str>| -> String {
            vals.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
        };
        writeln!(out, "{}", line(self.columns.iter().map(String::as_str).collect()))?;
        for r in &cells {
            writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    fn flat(&self) -> (Vec<String>, Vec<Vec<Value>>) {
        if self.columns.is_empty() {
            let scalar: Vec<(&String, &Value)> = self.fields.iter().filter(|(_, v)| !v.is_object()).collect();
            (scalar.iter().map(|(k, _)| (*k).clone()).collect(), vec![scalar.iter().map(|(_, v)| (*v).clone()).collect()])
        } else {
            (self.columns.clone(), self.rows.clone())
        }
    }
}

/// A JSON value as a bare cell string (strings unquoted, arrays joined).
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// Long "num/den" strings shown as decimals (pretty output only).
fn short(s: &str) -> String {
    if s.len() <= 32 {
        return s.to_string();
    }
    match s.parse::<BigRational>() {
        Ok(r) => format!("~{:.12e}", wdl_core::local::to_f64(&r)),
        Err(_) => s.to_string(),
    }
}

/// An exact rational as "num/den" (the denominator is always written).
pub fn rat(r: &BigRational) -> Value {
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

pub fn opt_rat(r: Option<&BigRational>) -> Value {
    r.map(rat).unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rationals_always_carry_a_denominator() {
        assert_eq!(rat(&BigRational::from_integer(3.into())), json!("3/1"));
        assert_eq!(rat(&BigRational::new(6.into(), (-8).into())), json!("-3/4"));
    }

    #[test]
    fn json_layout() {
        let mut r = Report::new("demo");
        r.field("p", 5);
        r.columns(&["key", "value"]);
        r.row(vec![json!("I0"), json!("1/2")]);
        let v = r.to_json(false);
        assert_eq!(v, json!({"schema": "1", "command": "demo", "p": 5, "rows": [{"key": "I0", "value": "1/2"}]}));
        assert!(r.to_json(true).get("timestamp").is_some());
    }

    #[test]
    fn csv_and_pretty() {
        let mut r = Report::new("demo");
        r.field("p", 5);
        r.columns(&["key", "value"]);
        r.row(vec![json!("I0"), json!("1/2")]);
        r.row(vec![json!("I>=1*"), Value::Null]);
        let mut csv = Vec::new();
        r.write(Format::Csv, false, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "key,value\nI0,1/2\nI>=1*,\n");
        let mut pretty = Vec::new();
        r.write(Format::Pretty, false, &mut pretty).unwrap();
        assert_eq!(String::from_utf8(pretty).unwrap(), "p: 5\n\nkey    value\nI0     1/2\nI>=1*\n");
    }

    #[test]
    fn pretty_shortens_long_rationals() {
        assert_eq!(short("1/3"), "1/3");
        let long = format!("1/{}", "3".repeat(40));
        assert_eq!(short(&long), "~3.000000000000e-40");
        let text = "x".repeat(40);
        assert_eq!(short(&text), text);
    }

    #[test]
    fn csv_without_rows_uses_fields() {
        let mut r = Report::new("demo");
        r.field("a", "x").field("b", 2);
        let mut csv = Vec::new();
        r.write(Format::Csv, false, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "a,b\nx,2\n");
    }
}
