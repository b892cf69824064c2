//! Emission of command reports as JSON documents or CSV tables.

use serde_json::{Map, Number, Value};

use super::config::Format;

/// Significant digits kept for every emitted float.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float re-parses")
}

/// Rounds every float in a JSON tree; integers are left alone.
pub fn round_tree(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("checked f64"));
            *value = Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_tree),
        Value::Object(map) => map.values_mut().for_each(round_tree),
        _ => {}
    }
}

/// Output of one command before formatting.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub results: Vec<Value>,
    /// CSV header paired with the record key each column reads.
    pub columns: Vec<(&'static str, &'static str)>,
    pub diagnostics: Map<String, Value>,
    /// Per-row numerical failures, already formatted for the payload.
    pub errors: Vec<Value>,
}

impl Report {
    pub fn new(columns: Vec<(&'static str, &'static str)>) -> Self {
        Report {
            columns,
            ..Report::default()
        }
    }

    pub fn has_failures(&self) -> bool {
        !self.errors.is_empty()
    }
}

pub fn render(command: &str, config_echo: Value, report: &Report, format: Format) -> String {
    let mut results = Value::Array(report.results.clone());
    round_tree(&mut results);
    match format {
        Format::Json => {
            let mut diagnostics = report.diagnostics.clone();
            diagnostics.insert("errors".into(), Value::Array(report.errors.clone()));
            let mut diagnostics = Value::Object(diagnostics);
            round_tree(&mut diagnostics);
            let mut echo = config_echo;
            round_tree(&mut echo);
            let mut doc = Map::new();
            doc.insert("command".into(), Value::String(command.into()));
            doc.insert("config_echo".into(), echo);
            doc.insert("results".into(), results);
            doc.insert("diagnostics".into(), diagnostics);
            let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
            text.push('\n');
            text
        }
        Format::Csv => {
            let rows = results.as_array().expect("built as an array");
            let mut text = report
                .columns
                .iter()
                .map(|(header, _)| *header)
                .collect::<Vec<_>>()
                .join(",");
            text.push('\n');
            for row in rows {
                let cells: Vec<String> = report
                    .columns
                    .iter()
                    .map(|(_, key)| csv_cell(row.get(*key).unwrap_or(&Value::Null)))
                    .collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            text
        }
    }
}

/// Scalars print as in JSON; arrays join with spaces and nested arrays with
/// semicolons.
fn csv_cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let nested = items.iter().any(Value::is_array);
            let sep = if nested { ";" } else { " " };
            items.iter().map(csv_cell).collect::<Vec<_>>().join(sep)
        }
        other => other.to_string(),
    }
}
