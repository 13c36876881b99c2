//! Experiment records and their append-only JSON-lines store.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const VERSION_TAG: &str = concat!("mflab-", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub params: BTreeMap<String, Value>,
    pub measured: BTreeMap<String, Value>,
    /// Which side of the true quantity each measured value bounds.
    pub bounds: BTreeMap<String, String>,
    pub flags: Vec<String>,
    pub wall_time_s: f64,
    pub version: String,
}

impl ExperimentRecord {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            params: BTreeMap::new(),
            measured: BTreeMap::new(),
            bounds: BTreeMap::new(),
            flags: Vec::new(),
            wall_time_s: 0.0,
            version: VERSION_TAG.to_string(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.measured.insert(key.to_string(), serde_json::to_value(value).expect("serializable measurement"));
    }

    pub fn bound(&mut self, key: &str, side: &str) {
        self.bounds.insert(key.to_string(), side.to_string());
    }

    pub fn flag(&mut self, flag: impl Into<String>) {
        let flag = flag.into();
        if !self.flags.contains(&flag) {
            self.flags.push(flag);
        }
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        self.measured.get(key).and_then(Value::as_f64)
    }

    pub fn numbers(&self, key: &str) -> Option<Vec<f64>> {
        self.measured.get(key)?.as_array()?.iter().map(Value::as_f64).collect()
    }

    /// Every numeric leaf of `measured`, keyed by its JSON path.
    pub fn numeric_leaves(&self) -> BTreeMap<String, f64> {
        fn walk(prefix: String, v: &Value, out: &mut BTreeMap<String, f64>) {
            match v {
                Value::Number(n) => {
                    out.insert(prefix, n.as_f64().unwrap_or(f64::NAN));
                }
                Value::Array(items) => {
                    for (i, item) in items.iter().enumerate() {
                        walk(format!("{prefix}[{i}]"), item, out);
                    }
                }
                Value::Object(map) => {
                    for (k, item) in map {
                        walk(format!("{prefix}.{k}"), item, out);
                    }
                }
                _ => {}
            }
        }
        let mut out = BTreeMap::new();
        for (k, v) in &self.measured {
            walk(k.clone(), v, &mut out);
        }
        out
    }

    /// Largest relative difference between the numeric measurements of two
    /// records; infinite when their shapes differ.
    pub fn max_relative_difference(&self, other: &ExperimentRecord) -> f64 {
        let a = self.numeric_leaves();
        let b = other.numeric_leaves();
        if a.len() != b.len() || a.keys().ne(b.keys()) {
            return f64::INFINITY;
        }
        a.values()
            .zip(b.values())
            .map(|(x, y)| {
                if x == y {
                    0.0
                } else {
                    (x - y).abs() / x.abs().max(y.abs()).max(1e-300)
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// Append-only JSON-lines file; appends go through one lock.
#[derive(Debug)]
pub struct RecordStore {
    path: PathBuf,
    writer: Mutex<()>,
}

impl RecordStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into(), writer: Mutex::new(()) }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, record: &ExperimentRecord) -> Result<()> {
        let _guard = self.writer.lock().expect("record store lock");
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(file, "{}", record.to_line())?;
        Ok(())
    }

    pub fn load(&self) -> Result<Vec<ExperimentRecord>> {
        load_records(&self.path)
    }
}

pub fn load_records(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| Error::Parameter(format!("record at line {} is malformed: {e}", i + 1)))?,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn store_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = RecordStore::new(dir.path().join("records.jsonl"));
        let mut rec = ExperimentRecord::new("demo").param("N", 64).param("seed", 1);
        rec.set("ratio", 0.5);
        rec.set("series", vec![1.0, 2.0]);
        rec.flag("x");
        rec.flag("x");
        store.append(&rec).unwrap();
        store.append(&rec).unwrap();
        let back = store.load().unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0], rec);
        assert_eq!(back[0].flags, ["x"]);
        assert_eq!(rec.max_relative_difference(&back[1]), 0.0);
        let mut other = rec.clone();
        other.set("ratio", 0.6);
        assert!((rec.max_relative_difference(&other) - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(rec.numbers("series").unwrap(), [1.0, 2.0]);
    }
}
