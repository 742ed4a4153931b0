//! Rendering of command results as JSON, CSV or text.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Rows for the structured formats plus a human rendering.
#[derive(Default, Debug)]
pub struct Doc {
    pub rows: Vec<Value>,
    pub text: Vec<String>,
}

impl Doc {
    pub fn push(&mut self, row: Value, line: String) {
        self.rows.push(row);
        self.text.push(line);
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        _ => v.to_string(),
    }
}

/// Top-level keys in first-seen order; nested values become compact JSON.
pub fn to_csv(rows: &[Value]) -> String {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        if let Value::Object(m) = r {
            for k in m.keys() {
                if !cols.contains(k) {
                    cols.push(k.clone());
                }
            }
        }
    }
    if cols.is_empty() {
        cols.push("value".into());
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&cols).expect("in-memory write");
    for r in rows {
        let rec: Vec<String> = match r {
            Value::Object(m) => cols.iter().map(|c| m.get(c).map(cell).unwrap_or_default()).collect(),
            other => vec![cell(other)],
        };
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn render(doc: &Doc, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&doc.rows).expect("serialisable");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(&doc.rows),
        Format::Text => {
            let mut s = doc.text.join("\n");
            s.push('\n');
            s
        }
    }
}

pub fn emit(doc: &Doc, format: Format, out: Option<&Path>) -> std::io::Result<()> {
    let s = render(doc, format);
    match out {
        Some(p) => std::fs::write(p, s),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(s.as_bytes())?;
            lock.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_union_of_columns() {
        let rows = vec![json!({"a": 1, "b": "x"}), json!({"a": 2, "c": [1, 2], "d": null})];
        assert_eq!(to_csv(&rows), "a,b,c,d\n1,x,,\n2,,\"[1,2]\",\n");
    }

    #[test]
    fn formats() {
        let mut d = Doc::default();
        d.push(json!({"n": 1}), "n = 1".into());
        assert_eq!(render(&d, Format::Text), "n = 1\n");
        assert_eq!(render(&d, Format::Json), "[\n  {\n    \"n\": 1\n  }\n]\n");
    }
}
