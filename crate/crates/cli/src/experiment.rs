//! Seeded experiment grids.
//!
//! ```json
//! {"group": {"kind": "cyclic", "n": 1009},
//!  "set": {"kind": "ap", "start": 0, "step": 1, "length": 200},
//!  "operation": {"op": "periods", "method": "sample"},
//!  "grid": {"epsilon": ["1/2", "1/4"], "seeds": [1, 2]}}
//! ```
//!
//! Cells are the product `epsilon × d × seeds` in that nesting order; a
//! missing axis contributes a single unset value (the master seed for
//! `seeds`).

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context as _, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use vcgrp_core::descriptor::{GroupDesc, MapDescriptor, SetDescriptor, SetGen};
use vcgrp_core::rational::{self, Rational};
use vcgrp_core::{GSet, Group};

use crate::ops::{check_method, execute, CellParams, Check, Inputs, Operation};
use crate::output::Format;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(default, with = "rational::vec_as_string")]
    pub epsilon: Vec<Rational>,
    #[serde(default)]
    pub d: Vec<usize>,
    #[serde(default)]
    pub seeds: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub group: Option<GroupDesc>,
    #[serde(default)]
    pub set: Option<SetGen>,
    /// The second set `B`, where the operation takes one.
    #[serde(default)]
    pub other: Option<SetGen>,
    /// Sampler translates `S`.
    #[serde(default)]
    pub scope: Option<SetGen>,
    #[serde(default)]
    pub map: Option<MapDescriptor>,
    pub operation: Operation,
    #[serde(default)]
    pub grid: Grid,
    /// Master seed; the command-line seed takes precedence.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        ExperimentConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        check_method(&config.operation)?;
        Ok(config)
    }

    fn build_inputs(&self) -> Result<Inputs> {
        let group: Option<Arc<Group>> = self.group.as_ref().map(|g| g.build()).transpose()?;
        let build = |gen: &Option<SetGen>, what: &str| -> Result<Option<GSet>> {
            match (gen, &self.group, &group) {
                (None, _, _) => Ok(None),
                (Some(gen), Some(desc), Some(g)) => Ok(Some(
                    SetDescriptor::new(desc.clone(), gen.clone())
                        .build_in(g)
                        .with_context(|| format!("building {what}"))?,
                )),
                _ => anyhow::bail!("`{what}` needs a `group`"),
            }
        };
        Ok(Inputs {
            a: build(&self.set, "set")?,
            b: build(&self.other, "other")?,
            s: build(&self.scope, "scope")?,
            map: self.map.as_ref().map(|m| m.build()).transpose().context("building map")?,
            group,
        })
    }

    pub fn cells(&self, master_seed: u64) -> Vec<CellParams> {
        let eps: Vec<Option<Rational>> = axis(&self.grid.epsilon);
        let ds: Vec<Option<usize>> = axis(&self.grid.d);
        let seeds = if self.grid.seeds.is_empty() {
            vec![master_seed]
        } else {
            self.grid.seeds.clone()
        };
        let mut out = Vec::new();
        for e in &eps {
            for d in &ds {
                for &seed in &seeds {
                    out.push(CellParams { epsilon: *e, d: *d, seed });
                }
            }
        }
        out
    }
}

fn axis<T: Copy>(values: &[T]) -> Vec<Option<T>> {
    if values.is_empty() {
        vec![None]
    } else {
        values.iter().copied().map(Some).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub index: usize,
    pub operation: &'static str,
    #[serde(flatten)]
    pub params: CellParams,
    /// `ok` or `error`.
    pub status: &'static str,
    pub metric: Option<&'static str>,
    pub value: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CellReport {
    pub fn hard_counts(&self) -> (usize, usize) {
        let hard = self.checks.iter().filter(|c| c.hard);
        let passed = hard.clone().filter(|c| c.passed).count();
        (passed, hard.count() - passed)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub cells: usize,
    pub errors: usize,
    pub hard_checks_passed: usize,
    pub hard_checks_failed: usize,
    pub all_passed: bool,
}

impl Summary {
    pub fn recount(cells: &[CellReport]) -> Summary {
        let (mut passed, mut failed) = (0, 0);
        for c in cells {
            let (p, f) = c.hard_counts();
            passed += p;
            failed += f;
        }
        Summary {
            cells: cells.len(),
            errors: cells.iter().filter(|c| c.status == "error").count(),
            hard_checks_passed: passed,
            hard_checks_failed: failed,
            all_passed: failed == 0,
        }
    }
}

/// Everything in a report is a function of the config and master seed;
/// timings go to stderr instead.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub config: Value,
    pub seed: u64,
    pub cells: Vec<CellReport>,
    pub summary: Summary,
}

/// Runs one cell. A failure to run is recorded as a failed `completed`
/// hard check so that it counts against the exit code.
pub fn run_cell(index: usize, op: &Operation, inputs: &Inputs, params: CellParams) -> CellReport {
    match execute(op, inputs, &params) {
        Ok(o) => {
            let mut checks = vec![Check {
                name: "completed".into(),
                passed: true,
                hard: true,
            }];
            checks.extend(o.checks);
            CellReport {
                index,
                operation: op.name(),
                params,
                status: "ok",
                metric: Some(o.metric),
                value: o.value,
                checks,
                result: Some(o.result),
                error: None,
            }
        }
        Err(e) => CellReport {
            index,
            operation: op.name(),
            params,
            status: "error",
            metric: None,
            value: Value::Null,
            checks: vec![Check {
                name: "completed".into(),
                passed: false,
                hard: true,
            }],
            result: None,
            error: Some(format!("{e:#}")),
        },
    }
}

/// Cells run in parallel and are merged in config order.
pub fn run(config: &ExperimentConfig, master_seed: u64) -> Result<RunReport> {
    let inputs = config.build_inputs()?;
    let cells: Vec<CellReport> = config
        .cells(master_seed)
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| run_cell(i, &config.operation, &inputs, p))
        .collect();
    let summary = Summary::recount(&cells);
    let mut echo = serde_json::to_value(config)?;
    // Output routing is not part of the experiment.
    if let Value::Object(m) = &mut echo {
        m.remove("output");
        m.remove("format");
    }
    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION"),
        config: echo,
        seed: master_seed,
        cells,
        summary,
    })
}
