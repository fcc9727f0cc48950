//! Report writers. CSV output has one row per (operation, cell) with the
//! fixed columns of [`Row`].

use std::io::Write;
use std::path::Path;

use anyhow::{Context as _, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::experiment::CellReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Serialize)]
pub struct Row {
    pub operation: String,
    pub cell: usize,
    pub epsilon: String,
    pub d: String,
    pub seed: u64,
    pub status: String,
    pub metric: String,
    pub value: String,
    pub hard_passed: usize,
    pub hard_failed: usize,
    /// Names of failing checks, hard and soft, separated by `;`.
    pub failed_checks: String,
    pub error: String,
}

impl Row {
    pub fn from_cell(c: &CellReport) -> Row {
        let (hard_passed, hard_failed) = c.hard_counts();
        Row {
            operation: c.operation.into(),
            cell: c.index,
            epsilon: c.params.epsilon.map(|e| vcgrp_core::rational::format_rational(&e)).unwrap_or_default(),
            d: c.params.d.map(|d| d.to_string()).unwrap_or_default(),
            seed: c.params.seed,
            status: c.status.into(),
            metric: c.metric.unwrap_or_default().into(),
            value: match &c.value {
                Value::Null => String::new(),
                Value::String(s) => s.clone(),
                v => v.to_string(),
            },
            hard_passed,
            hard_failed,
            failed_checks: c
                .checks
                .iter()
                .filter(|k| !k.passed)
                .map(|k| k.name.as_str())
                .collect::<Vec<_>>()
                .join(";"),
            error: c.error.clone().unwrap_or_default(),
        }
    }
}

pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn json_string(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes to `out`, or to stdout when absent.
pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}
