use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::JobConfig;

/// Provenance flags that turn the exit status into 2.
pub const WARNING_FLAGS: &[&str] = &["unstabilized", "unconverged", "undercount", "incomplete"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Flagged,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Flagged => 2,
        }
    }
}

/// The JSON record of one job.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub job: JobConfig,
    pub status: Status,
    pub flags: BTreeSet<String>,
    pub notes: Vec<String>,
    pub result: Value,
    /// Plain-text summary printed next to the JSON.
    #[serde(skip)]
    pub table: String,
}

impl Report {
    pub fn new(job: JobConfig, result: Value, flags: BTreeSet<String>, notes: Vec<String>, table: String) -> Report {
        let status = if flags.iter().any(|f| WARNING_FLAGS.contains(&f.as_str())) {
            Status::Flagged
        } else {
            Status::Ok
        };
        Report {
            version: lamtree::VERSION,
            job,
            status,
            flags,
            notes,
            result,
            table,
        }
    }
}

/// Several reports written as one document.
#[derive(Clone, Debug, Serialize)]
pub struct Bundle {
    pub version: &'static str,
    pub status: Status,
    pub reports: Vec<Report>,
}

impl Bundle {
    pub fn new(reports: Vec<Report>) -> Bundle {
        let status = if reports.iter().any(|r| r.status == Status::Flagged) {
            Status::Flagged
        } else {
            Status::Ok
        };
        Bundle {
            version: lamtree::VERSION,
            status,
            reports,
        }
    }
}

/// Significant digits kept for floating point values in reports.
const FLOAT_DIGITS: usize = 12;

/// Rounds every float to a fixed number of significant digits so that the
/// last bits of a computation never reach the output.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            let rounded: f64 = format!("{x:.prec$e}", prec = FLOAT_DIGITS - 1).parse().expect("float");
            serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

/// Pretty JSON with sorted keys, normalized floats and a trailing newline.
pub fn render_json<T: Serialize>(value: &T) -> String {
    let v = normalize(serde_json::to_value(value).expect("serializable report"));
    let mut s = serde_json::to_string_pretty(&v).expect("serializable value");
    s.push('\n');
    s
}

/// Rows of `key  value` aligned on the key column.
pub fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

/// A word list shortened for display.
pub fn preview(words: &[String], limit: usize) -> String {
    if words.is_empty() {
        return "(none)".into();
    }
    let mut s = words.iter().take(limit).cloned().collect::<Vec<_>>().join(", ");
    if words.len() > limit {
        let _ = write!(s, ", ... ({} more)", words.len() - limit);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_are_rounded() {
        let v = normalize(json!({"x": 0.1 + 0.2, "y": [1.0000000000000002, 3], "z": "0.30000000000000004"}));
        assert_eq!(v, json!({"x": 0.3, "y": [1.0, 3], "z": "0.30000000000000004"}));
    }

    #[test]
    fn preview_truncates() {
        let w: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        assert_eq!(preview(&w, 2), "a, b, ... (1 more)");
        assert_eq!(preview(&[], 2), "(none)");
    }
}
