//! Deterministic CSV tables and their metadata sidecars.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Float)
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Float(x) => Some(x),
            Cell::Int(i) => Some(i as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Cell::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Floats use 17 significant digits in scientific notation so that
    /// identical inputs give byte-identical files.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) if x.is_nan() => "nan".into(),
            Cell::Float(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// A header plus rows of equal width.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cell at `row` in the named column.
    pub fn get(&self, row: usize, name: &str) -> Option<&Cell> {
        self.column(name).and_then(|c| self.rows.get(row).map(|r| &r[c]))
    }

    pub fn to_csv(&self) -> AppResult<String> {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = writer.into_inner().map_err(|e| AppError::config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    /// Rows as JSON objects keyed by column name.
    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let map = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.clone(), serde_json::to_value(v).unwrap_or(Value::Null)))
                        .collect();
                    Value::Object(map)
                })
                .collect(),
        )
    }
}

/// Provenance of an output file, written next to it as `<file>.meta.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub config_hash: String,
    pub config: Value,
    pub rows: usize,
    pub generator: String,
    pub timestamp: String,
}

impl Metadata {
    pub fn new(config: Value, rows: usize) -> Self {
        Metadata {
            config_hash: config_hash(&config),
            config,
            rows,
            generator: format!("floquet {}", env!("CARGO_PKG_VERSION")),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// SHA-256 of the compact JSON encoding. Object keys are sorted by
/// `serde_json`, so equal configs hash equally.
pub fn config_hash(config: &Value) -> String {
    hex::encode(Sha256::digest(config.to_string().as_bytes()))
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

pub fn write_text(path: &Path, text: &str) -> AppResult<()> {
    let io = |source| AppError::Io { path: path.to_path_buf(), source };
    let mut file = File::create(path).map_err(io)?;
    file.write_all(text.as_bytes()).map_err(io)
}

/// Writes `table` as CSV to `path` and its metadata to the sidecar.
pub fn write_table(path: &Path, table: &Table, meta: &Metadata) -> AppResult<()> {
    write_text(path, &table.to_csv()?)?;
    write_text(&sidecar_path(path), &(serde_json::to_string_pretty(meta)? + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::f64::consts::PI] {
            let text = Cell::Float(x).render();
            assert_eq!(text.parse::<f64>().unwrap(), x);
        }
        assert_eq!(Cell::Float(0.5).render(), "5.0000000000000000e-1");
        assert_eq!(Cell::Empty.render(), "");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b", "note"]);
        t.push(vec![Cell::Float(1.0), Cell::Bool(true), Cell::text("x,y")]);
        t.push(vec![Cell::Int(3), Cell::Empty, Cell::text("")]);
        assert_eq!(t.to_csv().unwrap(), "a,b,note\n1.0000000000000000e0,true,\"x,y\"\n3,,\n");
        assert_eq!(t.get(1, "a"), Some(&Cell::Int(3)));
    }

    #[test]
    fn hash_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"x": 1, "y": [1, 2]}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"y": [1, 2], "x": 1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/fig2.csv")), PathBuf::from("out/fig2.csv.meta.json"));
    }
}
