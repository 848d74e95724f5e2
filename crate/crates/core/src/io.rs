//! JSON persistence for complexes, hypergraphs and reports.
//!
//! Object files carry a `"type"` tag (`"simplicial"` or `"hypergraph"`) and
//! optionally the schema id. Floats in reports are written with 12
//! significant digits, witness vectors with 6.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::complexes::{Hypergraph, SimplicialComplex};
use crate::error::{Error, Result};
use crate::report::SCHEMA;

pub const REPORT_DIGITS: usize = 12;
pub const WITNESS_DIGITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Object {
    Simplicial(SimplicialComplex),
    Hypergraph(Hypergraph),
}

impl Object {
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("objects serialize");
        if let Value::Object(map) = &mut v {
            map.insert("schema".into(), SCHEMA.into());
        }
        v
    }
}

/// Parses an object, rejecting unknown schema ids. Errors name the field or
/// the line and column at fault.
pub fn parse_object(text: &str) -> Result<Object> {
    let mut value: Value = serde_json::from_str(text)?;
    let map = value.as_object_mut().ok_or_else(|| Error::validation("$", "expected a JSON object"))?;
    match map.remove("schema") {
        None => {}
        Some(Value::String(s)) if s == SCHEMA => {}
        Some(other) => return Err(Error::validation("schema", format!("expected \"{SCHEMA}\", found {other}"))),
    }
    match map.get("type").and_then(Value::as_str) {
        Some("simplicial") | Some("hypergraph") => {}
        Some(t) => return Err(Error::validation("type", format!("unknown object type \"{t}\""))),
        None => return Err(Error::validation("type", "missing \"simplicial\" or \"hypergraph\" tag")),
    }
    Ok(serde_json::from_value(value)?)
}

pub fn read_object(path: &Path) -> Result<Object> {
    parse_object(&fs::read_to_string(path)?)
}

pub fn write_object(object: &Object, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&object.to_json())? + "\n")?;
    Ok(())
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().expect("formatted float parses")
}

fn round_number(n: &Number, digits: usize) -> Value {
    match n.as_f64() {
        Some(x) if n.is_f64() => Number::from_f64(round_sig(x, digits)).map_or(Value::Null, Value::Number),
        _ => Value::Number(n.clone()),
    }
}

/// Rounds every float in `v`; arrays under a `"witness"` key get
/// [`WITNESS_DIGITS`].
pub fn round_floats(v: &Value, digits: usize) -> Value {
    match v {
        Value::Number(n) => round_number(n, digits),
        Value::Array(items) => Value::Array(items.iter().map(|x| round_floats(x, digits)).collect()),
        Value::Object(map) => {
            let mut out = Map::new();
            for (key, x) in map {
                let d = if key == "witness" && x.is_array() { WITNESS_DIGITS.min(digits) } else { digits };
                out.insert(key.clone(), round_floats(x, d));
            }
            Value::Object(out)
        }
        other => other.clone(),
    }
}

pub fn report_json(report: &impl Serialize) -> Result<Value> {
    Ok(round_floats(&serde_json::to_value(report)?, REPORT_DIGITS))
}

pub fn write_report(report: &impl Serialize, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&report_json(report)?)? + "\n")?;
    Ok(())
}
