use rayon::prelude::*;
use serde_json::json;
use vcgrp_core::bohr::{regularity_defect, DEFAULT_GRID_POINTS};
use vcgrp_core::periods::{bootstrap_bohr_periods, exact_almost_periods, sample_almost_periods, SamplerConfig};
use vcgrp_core::rational::{format_rational, to_f64};
use vcgrp_core::vc::{vcd_self, DEFAULT_CAP};
use vcgrp_core::{GSet, Group, Rational, Result};

use super::criterion;
use crate::instances::{period_grid, to_set, Cell};
use crate::{oracles, Clause, Context, Outcome};

criterion!(SamplerSoundness, 4, "sampler", 600, "sampled almost-periods are sound", sampler);
criterion!(BootstrapValidity, 5, "bootstrap", 600, "Bohr sets of almost-periods are valid and regular", bootstrap);

/// Every element of `T⁻¹T` with its exact ε check.
fn unsound_differences(g: &Group, counts: &[i64], a_len: usize, t: &GSet, eps: &Rational) -> Vec<usize> {
    let t: Vec<usize> = t.iter().collect();
    let diffs: oracles::Set = t
        .iter()
        .flat_map(|&s| t.iter().map(move |&u| g.op(g.inv(s), u)))
        .collect();
    diffs
        .into_par_iter()
        .filter(|&x| !oracles::is_almost_period(g, counts, a_len, x, *eps.numer(), *eps.denom()))
        .collect()
}

fn cell_seed(ctx: &Context, i: usize, eps: &Rational) -> u64 {
    ctx.derive(400 + 10 * i as u64 + *eps.denom() as u64)
}

fn grid(ctx: &Context, eps_list: &[Rational]) -> Result<Vec<(usize, Cell, usize, Rational)>> {
    let cells = period_grid()?;
    let take = ctx.count(cells.len(), 3);
    let mut out = Vec::new();
    for (i, cell) in cells.into_iter().enumerate().filter(|(i, _)| i % (9 / take).max(1) == 0) {
        let d = vcd_self(&cell.set, DEFAULT_CAP)?.dimension;
        for eps in eps_list {
            out.push((i, cell.clone(), d, *eps));
        }
    }
    Ok(out)
}

fn sampler(ctx: &Context) -> Result<Outcome> {
    let eps_list = [Rational::new(1, 2), Rational::new(1, 4), Rational::new(1, 8)];
    let mut sound = Vec::new();
    let mut nonempty = Vec::new();
    let mut reports = Vec::new();
    let jobs = grid(ctx, &eps_list)?;
    for (i, cell, d, eps) in &jobs {
        let a = &cell.set;
        let g = a.group();
        let tag = format!("{} {} ε={}", cell.group, cell.family, format_rational(eps));
        let full = GSet::full(g);
        match sample_almost_periods(a, a, &full, eps, (*d).max(1), cell_seed(ctx, *i, eps), &SamplerConfig::default()) {
            Ok(r) => {
                let counts = oracles::trace_counts(g, &to_set(a), &to_set(a));
                let bad = unsound_differences(g, &counts, a.len(), &r.t, eps);
                if !bad.is_empty() || !r.composition_sound {
                    sound.push(format!("{tag}: {} unsound differences, e.g. {:?}", bad.len(), bad.first()));
                }
                if r.t.is_empty() {
                    nonempty.push(format!("{tag}: T is empty"));
                }
                reports.push(json!({"cell": tag, "d_hint": d, "report": r}));
            }
            Err(e) => {
                nonempty.push(format!("{tag}: {e}"));
                reports.push(json!({"cell": tag, "d_hint": d, "error": e.to_string()}));
            }
        }
    }
    Ok(Outcome {
        clauses: vec![
            Clause::new("sound", jobs.len(), &sound),
            Clause::new("nonempty", jobs.len(), &nonempty),
        ],
        report: json!(reports),
    })
}

fn bootstrap(ctx: &Context) -> Result<Outcome> {
    let eps_list = [Rational::new(1, 2), Rational::new(1, 4)];
    let mut valid = Vec::new();
    let mut regular = Vec::new();
    let mut inside = Vec::new();
    let mut reports = Vec::new();
    let jobs = grid(ctx, &eps_list)?;
    for (i, cell, d, eps) in &jobs {
        let a = &cell.set;
        let g = a.group();
        let tag = format!("{} {} ε={}", cell.group, cell.family, format_rational(eps));
        let r = match bootstrap_bohr_periods(a, a, eps, (*d).max(1), cell_seed(ctx, *i, eps), &SamplerConfig::default()) {
            Ok(r) => r,
            Err(e) => {
                valid.push(format!("{tag}: {e}"));
                reports.push(json!({"cell": tag, "error": e.to_string()}));
                continue;
            }
        };
        if !r.all_valid {
            valid.push(format!("{tag}: worst offender {:?}", r.worst_offender));
        }
        let defect = regularity_defect(&r.spec, DEFAULT_GRID_POINTS);
        let violation = oracles::regularity_violation(g, r.spec.freqs(), to_f64(&r.spec.radius()), 1e-9);
        if defect != 0.0 || violation.is_some() {
            regular.push(format!("{tag}: defect {defect}, recomputed violation at τ = {violation:?}"));
        }
        // Two routes: the library's exact period set and a direct recount.
        let realized = r.spec.realize();
        let exact = exact_almost_periods(a, a, eps)?;
        let counts = oracles::trace_counts(g, &to_set(a), &to_set(a));
        let outside: Vec<usize> = realized
            .iter()
            .filter(|&x| !oracles::is_almost_period(g, &counts, a.len(), x, *eps.numer(), *eps.denom()))
            .collect();
        if !realized.is_subset(&exact) || !outside.is_empty() {
            inside.push(format!("{tag}: {} realized elements are not ε-periods", outside.len()));
        }
        reports.push(json!({"cell": tag, "report": r, "realized": realized.len(), "exact_periods": exact.len()}));
    }
    Ok(Outcome {
        clauses: vec![
            Clause::new("all_valid", jobs.len(), &valid),
            Clause::new("regular", jobs.len(), &regular),
            Clause::new("inside_exact_periods", jobs.len(), &inside),
        ],
        report: json!(reports),
    })
}
