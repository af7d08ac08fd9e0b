//! Golden records: one stored run per acceptance metric, replayed against the
//! current build.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::cli::{execute, Run, COMMANDS};
use crate::RunError;

pub const DEFAULT_CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/v1");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// `measured ≤ tolerance`.
    Le,
    /// `measured ≥ tolerance`.
    Ge,
    /// `|measured − value| ≤ tolerance`.
    Within,
    /// `measured == value`.
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    /// JSON pointer into the run envelope.
    pub metric: String,
    pub value: Value,
    #[serde(default)]
    pub tolerance: f64,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    #[serde(rename = "PAPER")]
    Paper,
    #[serde(rename = "TRIVIAL")]
    Trivial,
    #[serde(rename = "DERIVED")]
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tag: Tag,
    /// Citation for PAPER, oracle description otherwise.
    pub oracle: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenRecord {
    pub criterion_id: String,
    pub command: String,
    /// Parameter keys plus optional `seed`.
    #[serde(default)]
    pub config: Map<String, Value>,
    pub expected: Expected,
    pub provenance: Provenance,
}

impl GoldenRecord {
    pub fn validate(&self) -> Result<(), String> {
        if self.provenance.oracle.trim().is_empty() {
            return Err(format!("{}: provenance must name its source or oracle", self.criterion_id));
        }
        if !(self.expected.tolerance >= 0.0) {
            return Err(format!("{}: tolerance must be nonnegative", self.criterion_id));
        }
        if !self.expected.metric.starts_with('/') {
            return Err(format!("{}: metric must be a JSON pointer", self.criterion_id));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass { measured: Value },
    Fail { measured: Value, reason: String },
    Skip { reason: String },
}

pub fn compare(expected: &Expected, tolerance: f64, measured: &Value) -> Result<(), String> {
    let num = |v: &Value, what: &str| v.as_f64().ok_or_else(|| format!("{what} {v} is not a number"));
    match expected.comparison {
        Comparison::Eq => {
            if measured == &expected.value {
                Ok(())
            } else {
                Err(format!("{measured} != {}", expected.value))
            }
        }
        Comparison::Le => {
            let m = num(measured, "measured")?;
            if m <= tolerance {
                Ok(())
            } else {
                Err(format!("{m:e} > {tolerance:e}"))
            }
        }
        Comparison::Ge => {
            let m = num(measured, "measured")?;
            if m >= tolerance {
                Ok(())
            } else {
                Err(format!("{m:e} < {tolerance:e}"))
            }
        }
        Comparison::Within => {
            let m = num(measured, "measured")?;
            let v = num(&expected.value, "expected")?;
            let d = (m - v).abs();
            if d <= tolerance {
                Ok(())
            } else {
                Err(format!("|{m:?} − {v:?}| = {d:e} > {tolerance:e}"))
            }
        }
    }
}

/// Memoizes runs by (command, config) so records sharing a run execute it once.
#[derive(Default)]
pub struct RunCache {
    runs: BTreeMap<String, Result<Value, String>>,
}

impl RunCache {
    pub fn envelope(&mut self, command: &str, config: &Map<String, Value>) -> Result<Value, String> {
        let key = format!("{command}\u{0}{}", Value::Object(config.clone()));
        self.runs
            .entry(key)
            .or_insert_with(|| execute(command, Some(config), Map::new(), None).map(|r: Run| r.envelope()).map_err(|e| e.to_string()))
            .clone()
    }
}

pub fn replay_record(rec: &GoldenRecord, cache: &mut RunCache, tolerance_override: Option<f64>) -> Verdict {
    if let Err(reason) = rec.validate() {
        return Verdict::Fail { measured: Value::Null, reason };
    }
    if !COMMANDS.contains(&rec.command.as_str()) {
        return Verdict::Skip { reason: format!("command {:?} is not available in this build", rec.command) };
    }
    let env = match cache.envelope(&rec.command, &rec.config) {
        Ok(e) => e,
        Err(reason) => return Verdict::Fail { measured: Value::Null, reason },
    };
    let Some(measured) = env.pointer(&rec.expected.metric).cloned() else {
        return Verdict::Fail { measured: Value::Null, reason: format!("metric {} missing from output", rec.expected.metric) };
    };
    let tol = tolerance_override.unwrap_or(rec.expected.tolerance);
    match compare(&rec.expected, tol, &measured) {
        Ok(()) => Verdict::Pass { measured },
        Err(reason) => Verdict::Fail { measured, reason },
    }
}

pub fn list_records(dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| RunError::Usage(format!("{}: {e}", dir.display())))? {
        let p = entry?.path();
        if p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

pub fn load_record(path: &Path) -> Result<GoldenRecord, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))
}

#[derive(Debug, Default)]
pub struct ReplaySummary {
    pub lines: Vec<String>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// Rewrites `expected.value` from a fresh run. For `le`/`ge` the value is the
/// last measurement and is refreshed on pass. For `within`/`eq` it is the
/// reference: PAPER and TRIVIAL references never move, DERIVED ones are
/// re-recorded.
fn bless_record(rec: &mut GoldenRecord, verdict: &Verdict, path: &Path, name: &str, lines: &mut Vec<String>) -> Result<(), RunError> {
    let measured = match verdict {
        Verdict::Skip { .. } => return Ok(()),
        Verdict::Pass { measured } | Verdict::Fail { measured, .. } => measured,
    };
    let passed = matches!(verdict, Verdict::Pass { .. });
    let reference = matches!(rec.expected.comparison, Comparison::Within | Comparison::Eq);
    let update = match (reference, rec.provenance.tag) {
        (false, _) => passed,
        (true, Tag::Derived) => !measured.is_null(),
        (true, _) => false,
    };
    if !update {
        if !passed {
            lines.push(format!("KEEP {} {name}: {:?} reference is not rewritten from a failing run", rec.criterion_id, rec.provenance.tag));
        }
        return Ok(());
    }
    if measured != &rec.expected.value {
        rec.expected.value = measured.clone();
        let text = serde_json::to_string_pretty(&rec).map_err(|e| RunError::Io(e.to_string()))? + "\n";
        fs::write(path, text)?;
        lines.push(format!("BLESS {} {name}", rec.criterion_id));
    }
    Ok(())
}

/// Replays every file, optionally blessing each record.
pub fn replay_files(files: &[PathBuf], bless: bool, tolerance_override: Option<f64>) -> Result<ReplaySummary, RunError> {
    let mut cache = RunCache::default();
    let mut s = ReplaySummary::default();
    for path in files {
        let mut rec = load_record(path)?;
        let verdict = replay_record(&rec, &mut cache, tolerance_override);
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let line = match &verdict {
            Verdict::Pass { measured } => {
                s.passed += 1;
                format!("PASS {} {name} {} = {measured}", rec.criterion_id, rec.expected.metric)
            }
            Verdict::Fail { measured, reason } => {
                s.failed += 1;
                format!("FAIL {} {name} {} = {measured}: {reason}", rec.criterion_id, rec.expected.metric)
            }
            Verdict::Skip { reason } => {
                s.skipped += 1;
                format!("SKIP {} {name}: {reason}", rec.criterion_id)
            }
        };
        s.lines.push(line);
        if bless {
            bless_record(&mut rec, &verdict, path, &name, &mut s.lines)?;
        }
    }
    Ok(s)
}
