//! CSV/JSON writers with a provenance header.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const TOOL: &str = "qcovert";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const OUT_DIR_ENV: &str = "QCOVERT_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub config: Value,
}

impl Provenance {
    pub fn new<C: Serialize>(command: &str, config: &C, seed: Option<u64>) -> Self {
        let config = serde_json::to_value(config).unwrap_or(Value::Null);
        let canonical = serde_json::to_string(&json!({ "command": command, "config": config })).unwrap_or_default();
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(64);
        for b in digest {
            let _ = write!(hex, "{b:02x}");
        }
        Self { tool: TOOL, version: VERSION, command: command.into(), config_hash: format!("sha256:{hex}"), seed, config }
    }
}

/// A numeric table; each column carries a unit or definition.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: Vec<(&'static str, &'static str)>) -> Self {
        Self { name: name.into(), columns, rows: Vec::new() }
    }
    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|(n, _)| *n == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self, prov: &Provenance) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} {}", prov.tool, prov.version);
        let _ = writeln!(s, "# command: {}", prov.command);
        let _ = writeln!(s, "# config-hash: {}", prov.config_hash);
        match prov.seed {
            Some(seed) => {
                let _ = writeln!(s, "# seed: {seed}");
            }
            None => s.push_str("# seed: none\n"),
        }
        for (name, unit) in &self.columns {
            let _ = writeln!(s, "# column {name}: {unit}");
        }
        let names: Vec<&str> = self.columns.iter().map(|(n, _)| *n).collect();
        s.push_str(&names.join(","));
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| format!("{x:e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, prov: &Provenance) -> Value {
        let units: serde_json::Map<String, Value> =
            self.columns.iter().map(|(n, u)| (n.to_string(), Value::String(u.to_string()))).collect();
        json!({
            "provenance": prov,
            "columns": self.columns.iter().map(|(n, _)| *n).collect::<Vec<_>>(),
            "units": units,
            "rows": self.rows.iter().map(|r| r.iter().map(|&x| json_num(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(format!("{x}")))
}

pub fn out_dir(flag: Option<&Path>) -> PathBuf {
    match flag {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
    }
}

fn write_file(path: &Path, body: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, body)
}

pub fn write_table(dir: &Path, table: &Table, prov: &Provenance, format: Format) -> std::io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if matches!(format, Format::Csv | Format::Both) {
        let p = dir.join(format!("{}.csv", table.name));
        write_file(&p, &table.to_csv(prov))?;
        written.push(p);
    }
    if matches!(format, Format::Json | Format::Both) {
        let p = dir.join(format!("{}.json", table.name));
        write_file(&p, &(serde_json::to_string_pretty(&table.to_json(prov))? + "\n"))?;
        written.push(p);
    }
    Ok(written)
}

pub fn write_document(dir: &Path, name: &str, prov: &Provenance, result: &Value) -> std::io::Result<PathBuf> {
    let p = dir.join(format!("{name}.json"));
    let doc = json!({ "provenance": prov, "result": result });
    write_file(&p, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    Ok(p)
}
