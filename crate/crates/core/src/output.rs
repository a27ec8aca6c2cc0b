//! Machine-readable command output.
//!
//! Floats are written with 17 significant digits so that every `f64` survives a
//! round trip; maps are ordered, so identical inputs give byte-identical output.

use serde::ser::{Serialize, SerializeMap, SerializeSeq, Serializer};
use serde_json::value::RawValue;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: &str = "1";

/// A JSON value whose floats are formatted at full precision.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    List(Vec<Field>),
    Map(BTreeMap<String, Field>),
}

/// `f64` with 17 significant digits, e.g. `2.7182818284590451e0`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Null => s.serialize_unit(),
            Field::Bool(b) => s.serialize_bool(*b),
            Field::Int(i) => s.serialize_i64(*i),
            Field::Num(v) if v.is_finite() => {
                let raw =
                    RawValue::from_string(format_float(*v)).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            Field::Num(v) => s.serialize_str(&v.to_string()),
            Field::Str(t) => s.serialize_str(t),
            Field::List(items) => {
                let mut seq = s.serialize_seq(Some(items.len()))?;
                for it in items {
                    seq.serialize_element(it)?;
                }
                seq.end()
            }
            Field::Map(m) => {
                let mut map = s.serialize_map(Some(m.len()))?;
                for (k, v) in m {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Num(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i64)
    }
}

impl From<u32> for Field {
    fn from(v: u32) -> Self {
        Field::Int(v as i64)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Str(v.to_string())
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Str(v)
    }
}

impl From<Vec<f64>> for Field {
    fn from(v: Vec<f64>) -> Self {
        Field::List(v.into_iter().map(Field::Num).collect())
    }
}

/// Builds an ordered map from `(key, value)` pairs.
pub fn map<I, K>(pairs: I) -> BTreeMap<String, Field>
where
    I: IntoIterator<Item = (K, Field)>,
    K: Into<String>,
{
    pairs.into_iter().map(|(k, v)| (k.into(), v)).collect()
}

/// A rectangular table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// One JSON object per row.
    pub fn to_field(&self) -> Field {
        Field::List(
            self.rows
                .iter()
                .map(|r| {
                    Field::Map(
                        self.columns
                            .iter()
                            .cloned()
                            .zip(r.iter().cloned())
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    /// Comma-separated, LF line endings, header first.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(csv_cell))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

fn csv_cell(f: &Field) -> String {
    match f {
        Field::Null => String::new(),
        Field::Bool(b) => b.to_string(),
        Field::Int(i) => i.to_string(),
        Field::Num(v) if v.is_finite() => format_float(*v),
        Field::Num(v) => v.to_string(),
        Field::Str(s) => s.clone(),
        Field::List(_) | Field::Map(_) => serde_json::to_string(f).expect("serializable"),
    }
}

/// The envelope every command emits.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: BTreeMap<String, Field>,
    pub results: Field,
    pub diagnostics: Vec<String>,
    pub schema_version: String,
}

impl OutputRecord {
    pub fn new(command: &str, inputs: BTreeMap<String, Field>, results: Field) -> Self {
        OutputRecord {
            command: command.to_string(),
            inputs,
            results,
            diagnostics: Vec::new(),
            schema_version: SCHEMA_VERSION.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [std::f64::consts::E, 1e-300, -0.1, 123456789.0, 5e-324] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        let json = serde_json::to_string(&Field::Num(0.1)).unwrap();
        assert_eq!(json, "1.0000000000000001e-1");
        let back: f64 = serde_json::from_str(&json).unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn non_finite_values_become_strings() {
        assert_eq!(
            serde_json::to_string(&Field::Num(f64::NAN)).unwrap(),
            "\"NaN\""
        );
        assert_eq!(
            serde_json::to_string(&Field::Num(f64::INFINITY)).unwrap(),
            "\"inf\""
        );
    }

    #[test]
    fn record_layout_is_stable() {
        let r = OutputRecord::new(
            "demo",
            map([("b", Field::Int(2)), ("a", Field::Num(1.0))]),
            Field::Map(map([("value", Field::Num(2.5))])),
        );
        let a = r.to_json();
        assert_eq!(a, r.clone().to_json());
        assert!(a.find("\"a\"").unwrap() < a.find("\"b\"").unwrap());
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema_version"], "1");
        assert_eq!(v["results"]["value"], 2.5);
    }

    #[test]
    fn csv_has_header_and_lf() {
        let mut t = Table::new(&["x", "value"]);
        t.push(vec![Field::Num(0.0), Field::Num(1.0)]);
        t.push(vec![Field::Num(0.5), Field::Num(0.25)]);
        let s = t.to_csv();
        let lines: Vec<&str> = s.split('\n').collect();
        assert_eq!(lines[0], "x,value");
        assert_eq!(lines.len(), 4);
        assert!(!s.contains('\r'));
    }
}
