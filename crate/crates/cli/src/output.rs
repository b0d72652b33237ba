use serde_json::{Map, Value};

use crate::config::Format;

/// Writes either comma-separated table rows or one JSON object per line.
pub struct Emitter {
    format: Format,
    lines: Vec<String>,
}

impl Emitter {
    pub fn new(format: Format) -> Self {
        Emitter { format, lines: Vec::new() }
    }

    /// Emits a record; in table mode the values are joined with ", " in field order.
    pub fn record(&mut self, fields: &[(&str, Value)]) {
        let line = match self.format {
            Format::Table => fields
                .iter()
                .map(|(_, v)| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(", "),
            Format::Records => {
                let map: Map<String, Value> = fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
                Value::Object(map).to_string()
            }
        };
        self.lines.push(line);
    }

    /// Like `record`, but table mode prints `text` instead of the joined values.
    pub fn record_as(&mut self, fields: &[(&str, Value)], text: impl Into<String>) {
        match self.format {
            Format::Table => self.lines.push(text.into()),
            Format::Records => self.record(fields),
        }
    }

    pub fn finish(self) -> String {
        let mut out = self.lines.join("\n");
        if !out.is_empty() {
            out.push('\n');
        }
        out
    }
}
