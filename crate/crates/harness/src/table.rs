//! Persisted Monte Carlo outputs: a flat row table (CSV) plus a JSON
//! summary with verdicts and reproducibility metadata.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub params: String,
    pub statistic: String,
    pub value: f64,
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultTable {
    pub experiment: String,
    pub rows: Vec<ResultRow>,
    pub verdicts: Vec<Verdict>,
    pub config_hash: u64,
    pub seed: u64,
    pub version: String,
    /// Wall time is informational; it is not part of the reproducibility
    /// contract (rows and verdicts are).
    pub wall_ms: u128,
}

impl ResultTable {
    pub fn new(experiment: &str, config_hash: u64, seed: u64) -> Self {
        ResultTable {
            experiment: experiment.into(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            config_hash,
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            wall_ms: 0,
        }
    }

    pub fn push(&mut self, params: impl Into<String>, statistic: impl Into<String>, value: f64) {
        self.rows.push(ResultRow {
            params: params.into(),
            statistic: statistic.into(),
            value,
            stderr: None,
        });
    }

    pub fn push_with_se(
        &mut self,
        params: impl Into<String>,
        statistic: impl Into<String>,
        value: f64,
        stderr: f64,
    ) {
        self.rows.push(ResultRow {
            params: params.into(),
            statistic: statistic.into(),
            value,
            stderr: Some(stderr),
        });
    }

    pub fn verdict(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Fixed column order: params, statistic, value, stderr.
    pub fn write_csv(&self, out: &Path) -> Result<(), HarnessError> {
        let mut w = BufWriter::new(File::create(out)?);
        writeln!(w, "params,statistic,value,stderr")?;
        for r in &self.rows {
            match r.stderr {
                Some(se) => writeln!(w, "{},{},{},{}", r.params, r.statistic, r.value, se)?,
                None => writeln!(w, "{},{},{},", r.params, r.statistic, r.value)?,
            }
        }
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("table serializes")
    }

    pub fn write_summary(&self, out: &Path) -> Result<(), HarnessError> {
        let mut w = BufWriter::new(File::create(out)?);
        writeln!(
            w,
            "{}",
            serde_json::to_string_pretty(&self.summary_json()).expect("json")
        )?;
        Ok(())
    }
}
