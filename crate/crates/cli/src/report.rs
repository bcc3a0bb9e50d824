//! Versioned JSON reports and CSV summary tables.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

pub const SCHEMA: &str = "edlforge-report/1";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A CSV table; every cell is already a string so output is byte-stable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Table {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|s| s.to_string()).collect());
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    /// `"pass"` or `"fail"`.
    pub verdict: &'static str,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    #[serde(skip)]
    pub table: Table,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Report {
        Report {
            schema: SCHEMA,
            command: command.to_string(),
            verdict: "pass",
            config: config.clone(),
            checks: Vec::new(),
            data: Value::Object(Default::default()),
            timings: None,
            table: Table::default(),
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
        if !passed {
            self.verdict = "fail";
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Sets `data[key]`.
    pub fn put(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report data serializes");
        if let Value::Object(map) = &mut self.data {
            map.insert(key.to_string(), v);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes the JSON report and CSV table where configured; JSON goes to
    /// stdout when no output path is set.
    pub fn emit(&self, config: &RunConfig) -> Result<()> {
        let json = self.to_json();
        match &config.output {
            Some(path) => write_file(path, &json)?,
            None => std::io::stdout().write_all(json.as_bytes())?,
        }
        if let Some(path) = &config.csv {
            write_file(path, &self.table.to_csv()?)?;
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_checks() {
        let mut r = Report::new("x", &RunConfig::default());
        r.check("a", true, "");
        assert_eq!(r.verdict, "pass");
        r.check("b", false, "broken");
        assert_eq!(r.verdict, "fail");
        assert!(!r.passed());
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert!(v.get("timings").is_none());
    }

    #[test]
    fn csv_quotes_when_needed() {
        let mut t = Table::new(&["k", "v"]);
        t.push(["a", "[1,2]"]);
        assert_eq!(t.to_csv().unwrap(), "k,v\na,\"[1,2]\"\n");
    }
}
