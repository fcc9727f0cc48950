use serde_json::json;
use vcgrp_core::{Error, Result};

use super::criterion;
use super::{BootstrapValidity, Bogolyubov, Modelling, Regularity, SamplerSoundness};
use crate::{Clause, Context, Criterion, Outcome};

criterion!(Determinism, 12, "determinism", 900, "reports do not depend on the thread count", determinism);

fn report_bytes(c: &dyn Criterion, ctx: &Context, threads: usize) -> Result<String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| c.run(ctx))?;
    Ok(serde_json::to_string(&json!({"clauses": outcome.clauses, "report": outcome.report}))?)
}

fn determinism(ctx: &Context) -> Result<Outcome> {
    let reruns: [&dyn Criterion; 5] = [&SamplerSoundness, &BootstrapValidity, &Regularity, &Bogolyubov, &Modelling];
    let mut failures = Vec::new();
    let mut sizes = Vec::new();
    for c in reruns {
        let one = report_bytes(c, ctx, 1)?;
        let eight = report_bytes(c, ctx, 8)?;
        if one != eight {
            let at = one.bytes().zip(eight.bytes()).position(|(x, y)| x != y).unwrap_or(one.len().min(eight.len()));
            failures.push(format!("criterion {} differs from byte {at}", c.id()));
        }
        sizes.push(json!({"criterion": c.id(), "bytes": one.len()}));
    }
    Ok(Outcome {
        clauses: vec![Clause::new("byte_identical", reruns.len(), &failures)],
        report: json!(sizes),
    })
}
