//! Acceptance checks for `vcgrp-core`.
//!
//! Each criterion is a [`Criterion`] registered by name. A run produces
//! named clauses, each checked against a brute-force oracle from
//! [`oracles`], plus a JSON report that depends only on the seed; the
//! determinism criterion reruns others and compares those reports byte for
//! byte.

pub mod criteria;
pub mod instances;
pub mod oracles;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use serde::Serialize;
use vcgrp_core::registry::{Named, Registry};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Small instance counts, for smoke runs.
    Quick,
    /// The stated instance counts.
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub seed: u64,
    pub level: Level,
}

impl Context {
    pub fn new(seed: u64, level: Level) -> Context {
        Context { seed, level }
    }

    /// `full` at [`Level::Full`], otherwise `quick`.
    pub fn count(&self, full: usize, quick: usize) -> usize {
        match self.level {
            Level::Full => full,
            Level::Quick => quick,
        }
    }

    /// A seed for one part of a criterion.
    pub fn derive(&self, tag: u64) -> u64 {
        self.seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Clause {
    pub name: &'static str,
    pub passed: bool,
    /// Number of instances checked.
    pub cases: usize,
    pub detail: String,
}

impl Clause {
    pub fn new(name: &'static str, cases: usize, failures: &[String]) -> Clause {
        Clause {
            name,
            passed: failures.is_empty(),
            cases,
            detail: match failures {
                [] => String::new(),
                [first, ..] => format!("{} failure(s); first: {first}", failures.len()),
            },
        }
    }
}

/// What a criterion produced. `report` must not contain timings.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub clauses: Vec<Clause>,
    pub report: serde_json::Value,
}

pub trait Criterion: Named + Send + Sync {
    fn id(&self) -> u32;
    fn title(&self) -> &'static str;
    fn limit(&self) -> Duration;
    fn run(&self, ctx: &Context) -> vcgrp_core::Result<Outcome>;
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub clauses: Vec<Clause>,
    pub error: Option<String>,
    pub elapsed_ms: u128,
    pub limit_s: u64,
    pub within_limit: bool,
}

impl CriterionResult {
    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    /// `PASS`/`FAIL` line with the failing clauses.
    pub fn summary_line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!(
            "{status} criterion {:>2} {:<12} {:>9.2}s / {}s  {}",
            self.id,
            self.name,
            self.elapsed_ms as f64 / 1000.0,
            self.limit_s,
            self.title
        );
        if let Some(e) = &self.error {
            line.push_str(&format!("  [error: {e}]"));
        }
        if !self.within_limit {
            line.push_str("  [over time limit]");
        }
        for c in self.clauses.iter().filter(|c| !c.passed) {
            line.push_str(&format!("  [{}: {}]", c.name, c.detail));
        }
        line
    }
}

pub fn criteria() -> &'static Registry<dyn Criterion> {
    static REG: OnceLock<Registry<dyn Criterion>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut reg: Registry<dyn Criterion> = Registry::new("criterion");
        for c in criteria::all() {
            reg.register(c);
        }
        reg
    })
}

/// Looks a criterion up by name or by number.
pub fn find(key: &str) -> vcgrp_core::Result<Arc<dyn Criterion>> {
    if let Ok(id) = key.parse::<u32>() {
        if let Some(name) = criteria::all().iter().find(|c| c.id() == id).map(|c| c.name()) {
            return criteria().get(name);
        }
    }
    criteria().get(key)
}

/// Runs one criterion, turning errors and panics into a failed result.
pub fn run(criterion: &dyn Criterion, ctx: &Context) -> CriterionResult {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| criterion.run(ctx)));
    let elapsed = start.elapsed();
    let (clauses, error) = match outcome {
        Ok(Ok(o)) => (o.clauses, None),
        Ok(Err(e)) => (Vec::new(), Some(e.to_string())),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (Vec::new(), Some(format!("panicked: {msg}")))
        }
    };
    let within_limit = elapsed <= criterion.limit();
    CriterionResult {
        id: criterion.id(),
        name: criterion.name(),
        title: criterion.title(),
        passed: error.is_none() && within_limit && clauses.iter().all(|c| c.passed),
        clauses,
        error,
        elapsed_ms: elapsed.as_millis(),
        limit_s: criterion.limit().as_secs(),
        within_limit,
    }
}

/// Runs every registered criterion in id order.
pub fn run_all(ctx: &Context, mut on_result: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let mut all = criteria::all();
    all.sort_by_key(|c| c.id());
    all.iter()
        .map(|c| {
            let r = run(c.as_ref(), ctx);
            on_result(&r);
            r
        })
        .collect()
}

/// `(criterion, clause)` pairs whose stated form does not hold:
/// `(2ρ/π)^d |G|` is not a lower bound for `|B|` (`Z/100` with one frequency
/// at `ρ = 1/2` has 17 elements against 31.8). They are still run and
/// reported as failures.
pub const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[(7, "size_bound")];

/// Everything wrong with a set of results apart from the known unattainable
/// clauses failing: errors, overruns, other failing clauses, and known
/// clauses that unexpectedly pass.
pub fn unexpected_failures(results: &[CriterionResult]) -> Vec<String> {
    let mut out = Vec::new();
    for r in results {
        if let Some(e) = &r.error {
            out.push(format!("criterion {} ({}): {e}", r.id, r.name));
        }
        if !r.within_limit {
            out.push(format!("criterion {} ({}): over the {}s limit", r.id, r.name, r.limit_s));
        }
        for c in &r.clauses {
            let known = KNOWN_UNATTAINABLE.contains(&(r.id, c.name));
            if known && c.passed {
                out.push(format!("criterion {} ({}) clause {} now passes", r.id, r.name, c.name));
            } else if !known && !c.passed {
                out.push(format!("criterion {} ({}) clause {}: {}", r.id, r.name, c.name, c.detail));
            }
        }
    }
    out
}
