//! Versioned JSON reports and plot-ready CSV files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::config::{RunConfig, KEYS};
use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub status: String,
    /// Names and details of failed invariants.
    pub failures: Vec<String>,
    pub results: Value,
    /// Seconds since the epoch; excluded from determinism comparisons.
    pub timestamp: u64,
}

impl Report {
    pub fn new(config: &RunConfig, results: Value, failures: Vec<String>) -> Self {
        let parameters = KEYS
            .iter()
            .filter(|k| **k != "threads")
            .map(|k| (k.to_string(), config.get(k).expect("known key")))
            .collect();
        Report {
            schema: SCHEMA,
            command: config.command.name().to_string(),
            parameters,
            status: if failures.is_empty() { "pass" } else { "fail" }.to_string(),
            failures,
            results,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// The report with its timestamp removed, for comparing runs.
pub fn without_timestamp(json: &str) -> Result<Value, CliError> {
    let mut v: Value = serde_json::from_str(json)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timestamp");
    }
    Ok(v)
}

/// A CSV file: name relative to the output directory, header, rows.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvFile {
    pub name: String,
    pub header: String,
    pub rows: Vec<String>,
}

impl CsvFile {
    pub fn new(name: impl Into<String>, header: &str) -> Self {
        CsvFile {
            name: name.into(),
            header: header.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: String) {
        self.rows.push(row);
    }

    pub fn contents(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * 24);
        s.push_str(&self.header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub csv: Vec<CsvFile>,
}

impl Outcome {
    pub fn json_path(&self, out: &Path) -> PathBuf {
        out.join(format!("{}.json", self.report.command))
    }

    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(out)?;
        let mut paths = vec![self.json_path(out)];
        std::fs::write(&paths[0], self.report.to_json()?)?;
        for f in &self.csv {
            let p = out.join(&f.name);
            std::fs::write(&p, f.contents())?;
            paths.push(p);
        }
        Ok(paths)
    }
}
