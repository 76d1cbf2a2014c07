//! CSV and manifest output. Floats print with 17 significant digits so
//! runs round-trip losslessly and repeated runs are byte-identical.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct CsvWriter {
    rows: Vec<String>,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        CsvWriter { rows: vec![header.join(",")] }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.rows.push(cells.join(","));
    }

    pub fn bytes(&self) -> Vec<u8> {
        let mut out = self.rows.join("\n");
        out.push('\n');
        out.into_bytes()
    }

    /// Writes to the path, or stdout when none was given.
    pub fn emit(&self, out: Option<&Path>) -> std::io::Result<()> {
        match out {
            Some(path) => fs::write(path, self.bytes()),
            None => std::io::stdout().write_all(&self.bytes()),
        }
    }
}

/// Run manifest written next to the CSV as `<out>.manifest.json`.
/// Timestamps live here, never in the CSV, so CSV bytes stay reproducible.
pub struct Manifest {
    pub subcommand: String,
    pub params: Map<String, Value>,
    pub seed: u64,
    pub started: chrono::DateTime<chrono::Utc>,
    pub extra: Map<String, Value>,
}

impl Manifest {
    pub fn new(subcommand: &str, seed: u64) -> Self {
        Manifest {
            subcommand: subcommand.to_string(),
            params: Map::new(),
            seed,
            started: chrono::Utc::now(),
            extra: Map::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: Value) {
        self.params.insert(key.to_string(), value);
    }

    pub fn extra(&mut self, key: &str, value: Value) {
        self.extra.insert(key.to_string(), value);
    }

    /// No-op when the CSV went to stdout.
    pub fn emit(&self, out: Option<&Path>) -> std::io::Result<()> {
        let Some(path) = out else { return Ok(()) };
        let manifest_path = format!("{}.manifest.json", path.display());
        let mut doc = json!({
            "tool_version": env!("CARGO_PKG_VERSION"),
            "subcommand": self.subcommand,
            "params": self.params,
            "seed": self.seed,
            "started": self.started.to_rfc3339(),
            "finished": chrono::Utc::now().to_rfc3339(),
            "outputs": [path.display().to_string()],
        });
        for (k, v) in &self.extra {
            doc.as_object_mut().unwrap().insert(k.clone(), v.clone());
        }
        fs::write(manifest_path, serde_json::to_string_pretty(&doc).unwrap())
    }
}
