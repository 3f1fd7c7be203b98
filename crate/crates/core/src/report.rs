//! Check results and their byte-stable JSON/CSV serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::Result;

/// How a measured value is compared with its limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
    Equal,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Equal => "==",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            relation: Relation::AtMost,
            passed: value <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            relation: Relation::AtLeast,
            passed: value >= limit,
        }
    }

    pub fn equal(name: impl Into<String>, value: f64, expected: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit: expected,
            relation: Relation::Equal,
            passed: value == expected,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Check::equal(name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("value".into(), float(self.value));
        m.insert("limit".into(), float(self.limit));
        m.insert("relation".into(), Value::String(self.relation.symbol().into()));
        m.insert("passed".into(), Value::Bool(self.passed));
        Value::Object(m)
    }
}

/// Float as a JSON value; non-finite numbers become strings.
pub fn float(x: f64) -> Value {
    Number::from_f64(x).map_or_else(|| Value::String(format!("{x}")), Value::Number)
}

/// Results of one subcommand.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Section {
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
    pub error: Option<String>,
}

impl Section {
    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn data(&mut self, key: &str, v: Value) {
        self.data.insert(key.to_string(), v);
    }

    pub fn failed(error: impl ToString) -> Self {
        Section {
            error: Some(error.to_string()),
            ..Section::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert(
            "checks".into(),
            Value::Array(self.checks.iter().map(Check::to_value).collect()),
        );
        m.insert(
            "data".into(),
            Value::Object(self.data.iter().map(|(k, v)| (k.clone(), v.clone())).collect()),
        );
        if let Some(e) = &self.error {
            m.insert("error".into(), Value::String(e.clone()));
        }
        m.insert("passed".into(), Value::Bool(self.passed()));
        Value::Object(m)
    }
}

/// Serializes with sorted keys, two-space indentation, and every float in
/// `{:.16e}` form (17 significant digits).
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0, true);
    out.push('\n');
    out
}

/// Same as [`to_json_string`] on a single line.
pub fn to_json_line(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0, false);
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize, pretty: bool) {
    let pad = |out: &mut String, d: usize| {
        if pretty {
            out.push('\n');
            out.push_str(&"  ".repeat(d));
        }
    };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64().filter(|_| !n.is_f64()) {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64().filter(|_| !n.is_f64()) {
                let _ = write!(out, "{u}");
            } else {
                let _ = write!(out, "{:.16e}", n.as_f64().unwrap_or(f64::NAN));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                pad(out, depth + 1);
                write_value(out, item, depth + 1, pretty);
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                pad(out, depth + 1);
                out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                out.push(':');
                if pretty {
                    out.push(' ');
                }
                write_value(out, &map[*key], depth + 1, pretty);
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

/// Writes a CSV with a header row and floats in `{:.16e}` form.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}
