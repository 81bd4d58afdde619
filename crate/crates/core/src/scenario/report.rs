use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use super::{Check, Scenario};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Environment {
    pub version: String,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub checks: Vec<Check>,
    pub environment: Environment,
}

impl Report {
    pub fn new(scenario: &Scenario, seed: Option<u64>, checks: Vec<Check>) -> Self {
        let mut scenario = scenario.clone();
        scenario.seed = seed;
        Self { scenario, checks, environment: Environment { version: env!("CARGO_PKG_VERSION").to_string(), seed } }
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    /// Process exit code: number of failed checks, capped at 125.
    pub fn exit_code(&self) -> i32 {
        self.failures().min(125) as i32
    }
}

/// Writes `report` with sorted keys and every float as `%.12e`.
pub fn write_report<W: Write>(report: &Report, format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Json => {
            let value = serde_json::to_value(report)?;
            let mut text = String::new();
            write_value(&value, 0, &mut text);
            text.push('\n');
            out.write_all(text.as_bytes())?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["name", "value", "reference", "tolerance", "comparison", "pass"])?;
            for c in &report.checks {
                let comparison = serde_json::to_value(c.comparison)?;
                w.write_record([
                    c.name.clone(),
                    float(c.value),
                    float(c.reference),
                    float(c.tolerance),
                    comparison.as_str().unwrap_or_default().to_string(),
                    c.pass.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn float(x: f64) -> String {
    format!("{x:.12e}")
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => write!(out, "{u}").unwrap(),
            (None, Some(i)) => write!(out, "{i}").unwrap(),
            _ => out.push_str(&float(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad);
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            // serde_json's default map is ordered by key
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}
