use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use vcgrp_core::freiman::{model_embed, IsoStatus, DEFAULT_MAX_ATTEMPTS};
use vcgrp_core::rational::format_rational;
use vcgrp_core::regularity::{bogolyubov_subspace, regularity_bohr, regularity_subspace, BogolyubovMode, RegularityConfig};
use vcgrp_core::stability::{find_order_witness, is_k_stable, progression_witness, StabilityStatus, DEFAULT_BUDGET};
use vcgrp_core::{GSet, Group, Rational, Result};

use super::criterion;
use crate::instances::{progression, random_coset_union, span, structured_instances, subset_from_mask, to_set};
use crate::oracles::{self, Set};
use crate::{Clause, Context, Outcome};

criterion!(Regularity, 8, "regularity", 600, "regularity decompositions of structured sets", regularity);
criterion!(Bogolyubov, 9, "bogolyubov", 600, "subspaces inside A − A", bogolyubov);
criterion!(Modelling, 10, "modelling", 300, "Freiman 4-isomorphic models", modelling);
criterion!(Stability, 11, "stability", 600, "order property and VC-dimension", stability);

fn regularity(ctx: &Context) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.derive(8));
    let config = RegularityConfig::default();
    let (mut exact, mut inside, mut ap_ratio, mut ap_cover) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut reports = Vec::new();
    let mut subspace_cases = 0;
    for (p, n) in [(2usize, 8u32), (3, 5)] {
        let g = Group::vector_space(p, n)?;
        for codim in 1..=3usize {
            for count in 1..=4usize.min(p.pow(codim as u32)) {
                if ctx.level == crate::Level::Quick && count != codim {
                    continue;
                }
                for eps in [Rational::new(1, 2), Rational::new(1, 4)] {
                    let a = random_coset_union(&g, codim, count, &mut rng)?;
                    let seed = rng.random();
                    let tag = format!("(Z/{p})^{n} codim {codim} × {count} ε={}", format_rational(&eps));
                    subspace_cases += 1;
                    let dec = match regularity_subspace(&a, &eps, seed, &config) {
                        Ok(d) => d,
                        Err(e) => {
                            exact.push(format!("{tag}: {e}"));
                            continue;
                        }
                    };
                    let sa = to_set(&a);
                    let symdiff = sa.symmetric_difference(&to_set(&dec.w)).count();
                    if dec.symdiff_ratio != Rational::from_integer(0) || symdiff != 0 {
                        exact.push(format!("{tag}: ratio {}, recount {symdiff}", format_rational(&dec.symdiff_ratio)));
                    }
                    let h = to_set(&dec.h.realize());
                    if !h.is_subset(&oracles::quotient(&g, &sa, &sa)) {
                        inside.push(format!("{tag}: H ⊄ A − A"));
                    }
                    reports.push(json!({"instance": tag, "seed": seed, "decomposition": dec}));
                }
            }
        }
    }
    let g = Group::cyclic(1009)?;
    let half = Rational::new(1, 2);
    let lengths = if ctx.level == crate::Level::Full { vec![60, 120, 250, 500] } else { vec![60] };
    for &len in &lengths {
        let a = progression(&g, 0, 1, len)?;
        let seed = ctx.derive(800 + len as u64);
        let tag = format!("Z/1009 AP length {len}");
        let dec = match regularity_bohr(&a, &half, &half, seed, &config) {
            Ok(d) => d,
            Err(e) => {
                ap_ratio.push(format!("{tag}: {e}"));
                continue;
            }
        };
        let sa = to_set(&a);
        let symdiff = sa.symmetric_difference(&to_set(&dec.w)).count();
        if dec.symdiff_ratio > half || 2 * symdiff > a.len() {
            ap_ratio.push(format!("{tag}: ratio {}, recount {symdiff}/{}", format_rational(&dec.symdiff_ratio), a.len()));
        }
        let cover = oracles::sumset(&g, &sa, &to_set(&dec.h.realize()));
        if !to_set(&dec.w).is_subset(&cover) {
            ap_cover.push(format!("{tag}: W ⊄ A + H"));
        }
        reports.push(json!({"instance": tag, "seed": seed, "decomposition": dec}));
    }
    Ok(Outcome {
        clauses: vec![
            Clause::new("subspace_exact", subspace_cases, &exact),
            Clause::new("h_in_difference_set", subspace_cases, &inside),
            Clause::new("ap_symdiff", lengths.len(), &ap_ratio),
            Clause::new("ap_w_in_a_plus_h", lengths.len(), &ap_cover),
        ],
        report: json!(reports),
    })
}

fn bogolyubov(ctx: &Context) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.derive(9));
    let config = RegularityConfig::default();
    let instances = structured_instances(ctx.count(50, 6), &mut rng)?;
    let (mut dense_fail, mut doubling_fail) = (Vec::new(), Vec::new());
    let mut reports = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let a = &inst.set;
        let g = a.group();
        let (p, _) = g.require_vector_space()?;
        let sa = to_set(a);
        let diff = oracles::quotient(g, &sa, &sa);
        let tag = format!("#{i} {} {} |A|={}", inst.group, inst.kind, a.len());
        let seed = ctx.derive(900 + i as u64);
        match bogolyubov_subspace(a, BogolyubovMode::Dense, seed, &config) {
            Ok(out) => {
                let v = span(g, p, &out.basis)?;
                if v.len() != out.size || !v.is_subset(&diff) || !out.contained || !oracles::is_subspace(g, &v, p) {
                    dense_fail.push(format!("{tag}: |V| = {} (reported {}), inside {}", v.len(), out.size, v.is_subset(&diff)));
                }
                reports.push(json!({"instance": tag, "dense": out}));
            }
            Err(e) => dense_fail.push(format!("{tag}: {e}")),
        }
        match bogolyubov_subspace(a, BogolyubovMode::Doubling, seed, &config) {
            Ok(out) => {
                if let Err(why) = check_pullback(g, p, &sa, &diff, &out) {
                    doubling_fail.push(format!("{tag}: {why}"));
                }
                reports.push(json!({"instance": tag, "doubling": out}));
            }
            Err(e) => doubling_fail.push(format!("{tag}: {e}")),
        }
    }
    Ok(Outcome {
        clauses: vec![
            Clause::new("dense_inside_difference_set", instances.len(), &dense_fail),
            Clause::new("doubling_pullback_subspace", instances.len(), &doubling_fail),
        ],
        report: json!(reports),
    })
}

/// Recomputes `H = {x ∈ A − A : Mx ∈ V}` from the matrix and model basis.
fn check_pullback(
    g: &Group,
    p: usize,
    a: &Set,
    diff: &Set,
    out: &vcgrp_core::regularity::BogolyubovSubspace,
) -> std::result::Result<(), String> {
    let pb = out.pullback.as_ref().ok_or("no pullback report")?;
    let emb = &pb.embedding;
    let target = &emb.target;
    let v = span(target, p, &pb.model_basis).map_err(|e| e.to_string())?;
    let image = |x: usize| -> usize {
        let c: Vec<u64> = g.coords(x).unwrap().into_iter().map(|c| c as u64).collect();
        let y: Vec<usize> = emb.matrix.apply(&c).into_iter().map(|c| c as usize).collect();
        target.from_coords(&y).unwrap()
    };
    let h: Set = diff.iter().copied().filter(|&x| v.contains(&image(x))).collect();
    if !oracles::is_subspace(g, &h, p) {
        return Err(format!("pullback of size {} is not a subspace", h.len()));
    }
    if h != span(g, p, &out.basis).map_err(|e| e.to_string())? || h.len() != out.size {
        return Err("reported basis does not span the pullback".into());
    }
    if h.len() != v.len() || !pb.bijective || !pb.is_subspace {
        return Err(format!("|H| = {} but |V| = {}", h.len(), v.len()));
    }
    let fa: Set = a.iter().map(|&x| image(x)).collect();
    if oracles::quotient(target, &fa, &fa).len() != diff.len() || !pb.difference_preserved {
        return Err("|A − A| not preserved".into());
    }
    if !out.contained {
        return Err("library reports H ⊄ A − A".into());
    }
    Ok(())
}

fn iterated_difference(g: &Group, a: &Set, s: usize) -> Set {
    let mut sa = a.clone();
    for _ in 1..s {
        sa = oracles::sumset(g, &sa, a);
    }
    oracles::quotient(g, &sa, &sa)
}

fn modelling(ctx: &Context) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.derive(10));
    let spaces = [(2usize, 6u32), (2, 8), (2, 10), (3, 4), (3, 6), (5, 3), (5, 4), (7, 3)];
    let n = ctx.count(64, 8);
    let (mut iso, mut bound, mut diff_fail) = (Vec::new(), Vec::new(), Vec::new());
    let mut reports = Vec::new();
    for i in 0..n {
        let (p, dim) = spaces[i % spaces.len()];
        let g = Group::vector_space(p, dim)?;
        let size = rng.random_range(1..=12usize.min(g.order()));
        let a = GSet::new(&g, rand::seq::index::sample(&mut rng, g.order(), size))?;
        let seed = rng.random();
        let tag = format!("(Z/{p})^{dim} |A|={size}");
        let emb = match model_embed(&a, 4, seed, DEFAULT_MAX_ATTEMPTS) {
            Ok(e) => e,
            Err(e) => {
                iso.push(format!("{tag}: {e}"));
                continue;
            }
        };
        let sa = to_set(&a);
        let verified = matches!(emb.verification, IsoStatus::Verified { .. });
        if !verified || !oracles::is_s_isomorphism(&g, &emb.target, emb.map.pairs(), 4) {
            iso.push(format!("{tag}: library {:?}", emb.verification));
        }
        let d4 = iterated_difference(&g, &sa, 4).len();
        let pm = (p as u128).pow(emb.m as u32);
        if pm >= (p * d4) as u128 || !emb.bound_holds || emb.difference_size != d4 {
            bound.push(format!("{tag}: p^m = {pm}, |4A − 4A| = {d4}"));
        }
        let image: Set = emb.map.pairs().iter().map(|&(_, y)| y).collect();
        let (da, di) = (oracles::quotient(&g, &sa, &sa).len(), oracles::quotient(&emb.target, &image, &image).len());
        if da != di {
            diff_fail.push(format!("{tag}: |A − A| = {da}, image {di}"));
        }
        reports.push(json!({"instance": tag, "seed": seed, "embedding": emb}));
    }
    Ok(Outcome {
        clauses: vec![
            Clause::new("s_isomorphism", n, &iso),
            Clause::new("dimension_bound", n, &bound),
            Clause::new("difference_size", n, &diff_fail),
        ],
        report: json!(reports),
    })
}

fn stability(ctx: &Context) -> Result<Outcome> {
    let (mut construction, mut relation, mut oracle) = (Vec::new(), Vec::new(), Vec::new());
    for k in 1..=8usize {
        let (set, w) = progression_witness(k)?;
        let g = set.group();
        let expected_a: Vec<usize> = (0..k).collect();
        let expected_b: Vec<usize> = (0..k).rev().collect();
        let table_ok = (0..k).all(|i| (0..k).all(|j| set.contains(g.op(w.a[i], w.b[j])) == (i <= j)));
        let found = find_order_witness(&set, k, DEFAULT_BUDGET)?.is_some_and(|s| s.verified);
        if set.to_vec() != expected_a || g.order() != 4 * k || w.a != expected_a || w.b != expected_b || !w.verified || !table_ok || !found {
            construction.push(format!("k = {k}: a = {:?}, b = {:?}", w.a, w.b));
        }
    }
    let max_oracle_k = ctx.count(3, 2);
    let mut cases = 0;
    for g in [Group::cyclic(6)?, Group::symmetric(3)?] {
        for mask in 1u64..64 {
            let a = subset_from_mask(&g, mask);
            let sa = to_set(&a);
            let vg = oracles::vcd_global(&g, &sa);
            for k in 1..=4usize {
                cases += 1;
                let status = is_k_stable(&a, k, DEFAULT_BUDGET)?;
                let tag = format!("order {} {:?} k={k}", g.order(), a.to_vec());
                match &status {
                    StabilityStatus::Stable { .. } if vg + 1 > k => {
                        relation.push(format!("{tag}: stable but vcd(G, A) = {vg}"))
                    }
                    StabilityStatus::Unstable { witness, .. } => {
                        let ok = (0..k).all(|i| (0..k).all(|j| sa.contains(&g.op(witness.a[i], witness.b[j])) == (i <= j)));
                        if !ok {
                            oracle.push(format!("{tag}: witness fails the table"));
                        }
                    }
                    StabilityStatus::Unknown { .. } => relation.push(format!("{tag}: search budget exhausted")),
                    _ => {}
                }
                if k <= max_oracle_k {
                    let unstable = oracles::has_order_property(&g, &sa, k);
                    if unstable != matches!(status, StabilityStatus::Unstable { .. }) {
                        oracle.push(format!("{tag}: brute force says order property {unstable}"));
                    }
                }
            }
        }
    }
    Ok(Outcome {
        clauses: vec![
            Clause::new("progression_construction", 8, &construction),
            Clause::new("stable_implies_vc_bound", cases, &relation),
            Clause::new("matches_brute_force", cases, &oracle),
        ],
        report: json!({"cases": cases}),
    })
}
