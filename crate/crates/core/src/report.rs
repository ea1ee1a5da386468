//! Tables with a provenance header, written as CSV or JSON.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Metadata written ahead of every emitted table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub contributions: String,
}

/// SHA-256 of the JSON form of `config`, as lowercase hex.
pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_vec(config).map_err(|e| Error::InvalidParameter(format!("config not serialisable: {e}")))?;
    let mut hex = String::with_capacity(64);
    for b in Sha256::digest(&json).iter() {
        write!(hex, "{b:02x}").unwrap();
    }
    Ok(hex)
}

/// Named columns of JSON scalars plus free-form notes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Records {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub notes: Vec<String>,
}

impl Records {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Comma-separated values with `#` metadata lines on top.
pub fn render_csv(r: &Records, prov: &Provenance) -> String {
    let mut s = String::new();
    writeln!(s, "# {} {}", prov.tool, prov.version).unwrap();
    writeln!(s, "# command: {}", prov.command).unwrap();
    writeln!(s, "# config-sha256: {}", prov.config_hash).unwrap();
    writeln!(s, "# contributions: {}", prov.contributions).unwrap();
    for n in &r.notes {
        writeln!(s, "# {n}").unwrap();
    }
    writeln!(s, "{}", r.columns.join(",")).unwrap();
    for row in &r.rows {
        let cells: Vec<String> = row.iter().map(cell).collect();
        writeln!(s, "{}", cells.join(",")).unwrap();
    }
    s
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    provenance: &'a Provenance,
    notes: &'a [String],
    columns: &'a [String],
    records: Vec<serde_json::Map<String, Value>>,
}

/// The same records as [`render_csv`], one JSON object per row.
pub fn render_json(r: &Records, prov: &Provenance) -> String {
    let records = r.rows.iter().map(|row| r.columns.iter().cloned().zip(row.iter().cloned()).collect()).collect();
    let doc = JsonDoc { provenance: prov, notes: &r.notes, columns: &r.columns, records };
    let mut s = serde_json::to_string_pretty(&doc).expect("records serialise");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn prov() -> Provenance {
        Provenance {
            tool: "dipole".into(),
            version: "0.1.0".into(),
            command: "test".into(),
            config_hash: config_hash(&json!({"a": 1})).unwrap(),
            contributions: "th,vc".into(),
        }
    }

    fn sample() -> Records {
        let mut r = Records::new(["x", "name", "ok"]);
        r.push(vec![json!(0.5), json!("a,b"), json!(true)]);
        r.push(vec![json!(1e-300), json!("plain"), Value::Null]);
        r.notes.push("hello".into());
        r
    }

    #[test]
    fn csv_layout() {
        let s = render_csv(&sample(), &prov());
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# dipole 0.1.0");
        assert!(lines[2].starts_with("# config-sha256: ") && lines[2].len() == 17 + 64);
        assert_eq!(lines[3], "# contributions: th,vc");
        assert_eq!(lines[4], "# hello");
        assert_eq!(lines[5], "x,name,ok");
        assert_eq!(lines[6], "0.5,\"a,b\",true");
        assert_eq!(lines[7], "1e-300,plain,");
    }

    #[test]
    fn json_mirrors_csv() {
        let j: Value = serde_json::from_str(&render_json(&sample(), &prov())).unwrap();
        assert_eq!(j["records"][0]["name"], json!("a,b"));
        assert_eq!(j["records"][1]["x"], json!(1e-300));
        assert_eq!(j["provenance"]["contributions"], json!("th,vc"));
        assert_eq!(j["notes"][0], json!("hello"));
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = config_hash(&json!({"a": 1})).unwrap();
        assert_eq!(a, config_hash(&json!({"a": 1})).unwrap());
        assert_ne!(a, config_hash(&json!({"a": 2})).unwrap());
    }
}
