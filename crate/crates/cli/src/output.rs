//! JSON and CSV emission.
//!
//! JSON is one object per invocation: the command, its resolved parameters,
//! the seed, summary fields, the table rows and the verdict. CSV is the
//! table with a header row, or a single row of summary fields when the
//! command has no table. Nested objects become dotted column names.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use gzonoid_core::Verdict;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::manifest::Format;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub summary: Map<String, Value>,
    pub rows: Vec<Map<String, Value>>,
    pub verdict: Option<Verdict>,
}

fn object<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value).expect("plain data") {
        Value::Object(map) => map,
        other => {
            let mut map = Map::new();
            map.insert("value".into(), other);
            map
        }
    }
}

impl Report {
    pub fn new<P: Serialize>(command: &str, params: &P) -> Self {
        Self {
            command: command.to_string(),
            params: match serde_json::to_value(params).expect("plain data") {
                Value::Object(mut map) => {
                    map.retain(|_, v| !v.is_null());
                    Value::Object(map)
                }
                other => other,
            },
            seed: None,
            summary: Map::new(),
            rows: Vec::new(),
            verdict: None,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Merges the fields of `value` into the summary.
    pub fn summary<T: Serialize>(mut self, value: &T) -> Self {
        self.summary.extend(object(value));
        self
    }

    pub fn row<T: Serialize>(&mut self, value: &T) {
        self.rows.push(object(value));
    }

    pub fn verdict(mut self, verdict: Verdict) -> Self {
        self.verdict = Some(verdict);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        out.insert("command".into(), Value::String(self.command.clone()));
        out.insert("params".into(), self.params.clone());
        if let Some(seed) = self.seed {
            out.insert("seed".into(), seed.into());
        }
        out.extend(self.summary.clone());
        if !self.rows.is_empty() {
            out.insert("rows".into(), Value::Array(self.rows.iter().cloned().map(Value::Object).collect()));
        }
        if let Some(v) = self.verdict {
            out.insert("verdict".into(), Value::String(v.to_string()));
        }
        Value::Object(out)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut table: Vec<Vec<(String, String)>> = if self.rows.is_empty() {
            let mut row = Vec::new();
            flatten("", &self.summary, &mut row);
            vec![row]
        } else {
            self.rows
                .iter()
                .map(|r| {
                    let mut row = Vec::new();
                    flatten("", r, &mut row);
                    row
                })
                .collect()
        };
        if self.rows.is_empty() {
            if let Some(v) = self.verdict {
                table[0].push(("verdict".into(), v.to_string()));
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(table[0].iter().map(|c| &c.0))?;
        for row in &table {
            w.write_record(row.iter().map(|c| &c.1))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&self.to_json())? + "\n",
            Format::Csv => self.to_csv()?,
        })
    }

    /// Writes to `out`, or to stdout.
    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()?;
                Ok(())
            }
        }
    }
}

fn flatten(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(inner) => flatten(&key, inner, out),
            Value::Null => out.push((key, String::new())),
            Value::String(s) => out.push((key, s.clone())),
            other => out.push((key, other.to_string())),
        }
    }
}
