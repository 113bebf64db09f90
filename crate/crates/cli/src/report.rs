use std::fs;
use std::path::Path;

use lpkit::Result;
use serde::Serialize;
use serde_json::Value;

use crate::config::Settings;

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: String,
}

impl Criterion {
    pub fn below(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), passed: value < limit, value, threshold: format!("< {limit:e}") }
    }

    pub fn above(name: &str, value: f64, limit: f64) -> Self {
        Self { name: name.into(), passed: value > limit, value, threshold: format!("> {limit:e}") }
    }

    pub fn holds(name: &str, ok: bool) -> Self {
        Self { name: name.into(), passed: ok, value: if ok { 1.0 } else { 0.0 }, threshold: "holds".into() }
    }
}

/// Per-case rows, written in insertion order.
#[derive(Debug, Clone)]
pub struct CaseTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CaseTable {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: &'static str,
    pub statement: &'static str,
    pub criteria: Vec<Criterion>,
    pub metrics: Value,
    pub cases: CaseTable,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Criterion> {
        self.criteria.iter().filter(|c| !c.passed)
    }

    pub fn write(&self, dir: &Path, settings: &Settings, seed: u64) -> Result<()> {
        fs::create_dir_all(dir)?;
        let summary = serde_json::json!({
            "suite": self.suite,
            "statement": self.statement,
            "seed": seed,
            "settings": settings.entries(),
            "passed": self.passed(),
            "criteria": self.criteria,
            "metrics": self.metrics,
        });
        fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
        let mut writer = csv::Writer::from_path(dir.join("cases.csv"))?;
        writer.write_record(&self.cases.header)?;
        for row in &self.cases.rows {
            writer.write_record(row)?;
        }
        writer.flush()?;
        Ok(())
    }
}
