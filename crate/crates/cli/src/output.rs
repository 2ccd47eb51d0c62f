//! Table assembly and serialization.
//!
//! Every command produces a `Table`: an ordered metadata echo plus rows of
//! JSON values. CSV and JSON serializers render the very same
//! `serde_json::Value`s, so the two formats agree digit for digit.

use std::io::Write;

use serde_json::{json, Map, Value};

pub struct Table {
    /// Ordered (key, value) pairs echoed into every output.
    metadata: Vec<(String, Value)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            metadata: vec![
                ("tool".into(), json!("retrobell")),
                ("version".into(), json!(env!("CARGO_PKG_VERSION"))),
            ],
            columns,
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: Value) {
        self.metadata.push((key.to_string(), value));
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn write_csv<W: Write + ?Sized>(&self, w: &mut W) -> std::io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k} = {}", csv_cell(v))?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn write_json<W: Write + ?Sized>(&self, w: &mut W) -> std::io::Result<()> {
        let mut metadata = Map::new();
        for (k, v) in &self.metadata {
            metadata.insert(k.clone(), v.clone());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, val) in self.columns.iter().zip(row) {
                    obj.insert((*col).to_string(), val.clone());
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({ "metadata": Value::Object(metadata), "rows": rows });
        serde_json::to_writer_pretty(&mut *w, &doc)?;
        writeln!(w)
    }
}

/// One CSV cell: nulls empty, strings bare, everything else in JSON's own
/// textual form (shared with the JSON writer for numeric identity).
fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Serializes a finite float; non-finite values are data errors upstream.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub fn emit(table: &Table, format: Format, out: Option<&std::path::Path>) -> std::io::Result<()> {
    let render = |w: &mut dyn Write| match format {
        Format::Csv => table.write_csv(w),
        Format::Json => table.write_json(w),
    };
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            render(&mut f)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            render(&mut lock)
        }
    }
}
