//! JSON envelopes, CSV tables and error diagnostics.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::{RunError, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_f64(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

/// Shortest round-trip representation, always with `.` as the decimal point.
pub fn format_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, RunError> {
        let mut w = csv::WriterBuilder::new().delimiter(b',').terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| RunError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| RunError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| RunError::Io(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

pub fn envelope(command: &str, seed: u64, config: &Value, pass: bool, result: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "config": config,
        "status": if pass { "pass" } else { "fail" },
        "result": result,
    })
}

pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_else(|_| "null".into());
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Writes the run. CSV keeps only the table; the envelope goes to a
/// `.meta.json` sidecar (file output) or to stderr (stdout output).
pub fn emit(env: &Value, table: Option<&crate::output::Table>, format: Format, path: Option<&Path>) -> Result<(), RunError> {
    match format {
        Format::Json => {
            let s = to_json_string(env);
            match path {
                Some(p) => write_file(p, &s),
                None => std::io::stdout().write_all(s.as_bytes()).map_err(RunError::from),
            }
        }
        Format::Csv => {
            let table = table.ok_or_else(|| RunError::Usage("this command has no tabular output".into()))?;
            let csv = table.to_csv()?;
            let mut meta = env.clone();
            if let Some(obj) = meta.as_object_mut() {
                obj.remove("result");
                obj.insert("columns".into(), json!(table.header));
            }
            match path {
                Some(p) => {
                    write_file(p, &csv)?;
                    let mut side = p.as_os_str().to_owned();
                    side.push(".meta.json");
                    write_file(Path::new(&side), &to_json_string(&meta))
                }
                None => {
                    std::io::stdout().write_all(csv.as_bytes())?;
                    eprintln!("{}", serde_json::to_string(&meta).unwrap_or_default());
                    Ok(())
                }
            }
        }
    }
}

/// Machine-readable failure record for stderr.
pub fn diagnostic(command: Option<&str>, err: &RunError) -> String {
    serde_json::to_string(&json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "status": "error",
        "error": { "kind": err.kind(), "message": err.to_string(), "exit_code": err.exit_code() },
    }))
    .unwrap_or_default()
}
