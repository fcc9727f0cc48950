use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use vcgrp_core::freiman::{is_2_isomorphism_pair, FreimanMap};
use vcgrp_core::vc::{vcd, vcd_self, vcdr, DEFAULT_CAP};
use vcgrp_core::{Element, GSet, Group, Result};

use super::criterion;
use crate::instances::{extend_by_cyclic, progression, quaternion, subset_from_mask, to_set};
use crate::{oracles, Clause, Context, Outcome};

criterion!(VcCosets, 1, "vc-cosets", 60, "vcd(A) = 0 exactly on cosets", vc_cosets);
criterion!(VcProgressions, 2, "vc-aps", 30, "progressions have VC-dimension 2", vc_progressions);
criterion!(Invariance, 3, "invariance", 300, "translation, inversion and Freiman invariance", invariance);

fn vc_cosets(_ctx: &Context) -> Result<Outcome> {
    let groups = [
        ("Z/6", Group::cyclic(6)?),
        ("Z/8", Group::cyclic(8)?),
        ("Z/2xZ/4", Group::product(&[2, 4])?),
        ("S3", Group::symmetric(3)?),
    ];
    let mut zero_iff = Vec::new();
    let mut oracle = Vec::new();
    let mut cases = 0;
    let mut per_group = Vec::new();
    for (name, g) in &groups {
        let mut cosets = 0;
        for mask in 1u64..1 << g.order() {
            let a = subset_from_mask(g, mask);
            let set = to_set(&a);
            let d = vcd_self(&a, DEFAULT_CAP)?.dimension;
            let coset = oracles::is_coset(g, &set);
            cosets += coset as usize;
            cases += 1;
            if (d == 0) != coset {
                zero_iff.push(format!("{name} {:?}: vcd {d}, coset {coset}", a.to_vec()));
            }
            let brute = oracles::vcd(g, &set, &set);
            if brute != d {
                oracle.push(format!("{name} {:?}: library {d}, brute force {brute}", a.to_vec()));
            }
        }
        per_group.push(json!({"group": name, "subsets": (1u64 << g.order()) - 1, "cosets": cosets}));
    }
    Ok(Outcome {
        clauses: vec![
            Clause::new("zero_iff_coset", cases, &zero_iff),
            Clause::new("matches_brute_force", cases, &oracle),
        ],
        report: json!(per_group),
    })
}

const AP_MODULUS: usize = 1000;

fn vc_progressions(ctx: &Context) -> Result<Outcome> {
    let g = Group::cyclic(AP_MODULUS)?;
    // Wraparound-safe: `A − A` does not wrap, so `A` is Freiman-isomorphic
    // to an integer progression. Every start at full level, 0 when quick.
    let starts = ctx.count(AP_MODULUS, 1);
    let mut jobs = Vec::new();
    for len in 2..=12usize {
        for step in 1..AP_MODULUS {
            if 2 * (len - 1) * step >= AP_MODULUS {
                break;
            }
            jobs.push((len, step));
        }
    }
    let results: Vec<(usize, Vec<String>)> = jobs
        .par_iter()
        .map(|&(len, step)| {
            let mut bad = Vec::new();
            let mut n = 0;
            for start in 0..starts {
                let a = progression(&g, start, step, len).expect("in range");
                let d = vcd_self(&a, DEFAULT_CAP).expect("non-empty").dimension;
                n += 1;
                let want = if len == 2 { 1 } else { 2 };
                if d != want {
                    bad.push(format!("start {start} step {step} length {len}: vcd {d}"));
                }
            }
            (n, bad)
        })
        .collect();
    let cases: usize = results.iter().map(|r| r.0).sum();
    let failures: Vec<String> = results.into_iter().flat_map(|r| r.1).collect();
    // Independent recount from the definition for progressions through 0.
    let oracle: Vec<String> = jobs
        .par_iter()
        .filter_map(|&(len, step)| {
            let a = to_set(&progression(&g, 0, step, len).expect("in range"));
            let d = oracles::vcd(&g, &a, &a);
            let want = if len == 2 { 1 } else { 2 };
            (d != want).then(|| format!("step {step} length {len}: brute force {d}"))
        })
        .collect();
    Ok(Outcome {
        clauses: vec![
            Clause::new("dimension", cases, &failures),
            Clause::new("brute_force", jobs.len(), &oracle),
        ],
        report: json!({"progressions": cases, "shapes": jobs.len()}),
    })
}

fn random_subset(g: &Arc<Group>, max: usize, rng: &mut ChaCha8Rng) -> GSet {
    let size = rng.random_range(1..=max.min(g.order()));
    GSet::new(g, rand::seq::index::sample(rng, g.order(), size)).expect("in range")
}

/// Pairs for `x ↦ (u x v, i)` inside `G × Z/k`.
fn lift_pairs(g: &Group, set: &GSet, u: Element, v: Element, i: usize) -> Vec<(Element, Element)> {
    set.iter().map(|x| (x, g.op(g.op(u, x), v) + g.order() * i)).collect()
}

#[derive(Default)]
struct Failures {
    oracle: Vec<String>,
    translation: Vec<String>,
    duality: Vec<String>,
    freiman: Vec<String>,
}

fn random_instances(ctx: &Context, f: &mut Failures) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.derive(3));
    let groups = vec![
        Group::cyclic(13)?,
        Group::cyclic(30)?,
        Group::cyclic(64)?,
        Group::product(&[2, 6])?,
        Group::product(&[3, 9])?,
        Group::vector_space(2, 5)?,
        Group::vector_space(3, 3)?,
        Group::symmetric(3)?,
        Group::symmetric(4)?,
        Group::dihedral(6)?,
        Group::dihedral(7)?,
        quaternion()?,
    ];
    let n = ctx.count(500, 60);
    for i in 0..n {
        let g = &groups[i % groups.len()];
        let a = random_subset(g, 8, &mut rng);
        let b = random_subset(g, 8, &mut rng);
        let t = rng.random_range(0..g.order());
        let (sa, sb) = (to_set(&a), to_set(&b));
        let tag = || format!("order {} A={:?} B={:?}", g.order(), a.to_vec(), b.to_vec());
        let d = vcd(&a, &b, DEFAULT_CAP)?.dimension;
        let brute = oracles::vcd(g, &sa, &sb);
        if d != brute {
            f.oracle.push(format!("{}: library {d}, brute force {brute}", tag()));
        }
        let left = vcd(&a.left_translate(t)?, &b.left_translate(t)?, DEFAULT_CAP)?.dimension;
        let right = vcd(&a.right_translate(t)?, &b.right_translate(t)?, DEFAULT_CAP)?.dimension;
        if left != d || right != d {
            f.translation.push(format!("{} t={t}: {d} vs left {left}, right {right}", tag()));
        }
        let r = vcdr(&a, &b, DEFAULT_CAP)?.dimension;
        let inv = vcd(&a.inverse(), &b.inverse(), DEFAULT_CAP)?.dimension;
        let brute_r = oracles::vcdr(g, &sa, &sb);
        if r != inv || r != brute_r {
            f.duality.push(format!("{}: vcdr {r}, vcd of inverses {inv}, brute vcdr {brute_r}", tag()));
        }
        // A lift into G × Z/k twisted by u, v, w is a 2-isomorphism pair.
        let k = rng.random_range(2..=4);
        let h = extend_by_cyclic(g, k)?;
        let (u, v, w) = (
            rng.random_range(0..g.order()),
            rng.random_range(0..g.order()),
            rng.random_range(0..g.order()),
        );
        let pa = lift_pairs(g, &a, u, v, rng.random_range(0..k));
        let pb = lift_pairs(g, &b, w, v, rng.random_range(0..k));
        check_freiman(g, &h, &pa, &pb, d, true, &tag, f)?;
        // Reduction of a cyclic group into a larger one is sometimes one.
        if g.moduli().is_some_and(|m| m.len() == 1) {
            let m = rng.random_range(g.order() + 1..=3 * g.order());
            let target = Group::cyclic(m)?;
            let pa: Vec<_> = a.iter().map(|x| (x, x)).collect();
            let pb: Vec<_> = b.iter().map(|x| (x, x)).collect();
            check_freiman(g, &target, &pa, &pb, d, false, &tag, f)?;
        }
    }
    Ok(n)
}

#[allow(clippy::too_many_arguments)]
fn check_freiman(
    g: &Arc<Group>,
    h: &Arc<Group>,
    pa: &[(Element, Element)],
    pb: &[(Element, Element)],
    d: usize,
    must_hold: bool,
    tag: &dyn Fn() -> String,
    f: &mut Failures,
) -> Result<()> {
    let fa = FreimanMap::new(g, h, pa.iter().copied())?;
    let fb = FreimanMap::new(g, h, pb.iter().copied())?;
    let lib = is_2_isomorphism_pair(&fa, &fb)?;
    let brute = oracles::is_2_isomorphism_pair(g, h, pa, pb);
    if lib != brute || (must_hold && !lib) {
        f.freiman.push(format!("{}: 2-isomorphism verdicts {lib} / {brute}", tag()));
    } else if lib {
        let image = vcd(fa.codomain(), fb.codomain(), DEFAULT_CAP)?.dimension;
        if image != d {
            f.freiman.push(format!("{}: vcd {d} but {image} on the image", tag()));
        }
    }
    Ok(())
}

fn groups_up_to_ten() -> Result<Vec<(String, Arc<Group>)>> {
    let mut out = vec![("trivial".to_string(), Group::product(&[])?)];
    for n in 2..=10 {
        out.push((format!("Z/{n}"), Group::cyclic(n)?));
    }
    for m in [[2usize, 2].as_slice(), &[2, 4], &[2, 2, 2], &[3, 3]] {
        out.push((format!("{m:?}"), Group::product(m)?));
    }
    out.push(("S3".into(), Group::symmetric(3)?));
    out.push(("D4".into(), Group::dihedral(4)?));
    out.push(("Q8".into(), quaternion()?));
    out.push(("D5".into(), Group::dihedral(5)?));
    Ok(out)
}

fn mask_image(g: &Group, mask: u64, f: impl Fn(Element) -> Element) -> u64 {
    (0..g.order()).filter(|&x| mask >> x & 1 == 1).fold(0, |acc, x| acc | 1 << f(x))
}

/// Every pair of non-empty subsets of every group of order at most ten
/// (at most eight when quick).
fn exhaustive(ctx: &Context, f: &mut Failures) -> Result<usize> {
    let mut cases = 0;
    let max_order = ctx.count(10, 8);
    for (name, g) in groups_up_to_ten()?.into_iter().filter(|(_, g)| g.order() <= max_order) {
        let n = g.order();
        let masks: Vec<u64> = (1u64..1 << n).collect();
        let sets: Vec<GSet> = masks.iter().map(|&m| subset_from_mask(&g, m)).collect();
        let idx = |m: u64| (m - 1) as usize;
        let lifted = extend_by_cyclic(&g, 2)?;
        let rows: Vec<Result<(Vec<u8>, Vec<String>)>> = sets
            .par_iter()
            .map(|a| {
                let mut dims = Vec::with_capacity(sets.len());
                let mut bad = Vec::new();
                for b in &sets {
                    let d = vcd(a, b, DEFAULT_CAP)?.dimension;
                    dims.push(d as u8);
                    let pa: Vec<_> = a.iter().map(|x| (x, x)).collect();
                    let pb: Vec<_> = b.iter().map(|x| (x, x + n)).collect();
                    let fa = FreimanMap::new(&g, &lifted, pa)?;
                    let fb = FreimanMap::new(&g, &lifted, pb)?;
                    if !is_2_isomorphism_pair(&fa, &fb)? {
                        bad.push(format!("{name} {:?} {:?}: lift rejected", a.to_vec(), b.to_vec()));
                    } else if vcd(fa.codomain(), fb.codomain(), DEFAULT_CAP)?.dimension != d {
                        bad.push(format!("{name} {:?} {:?}: lift changes vcd", a.to_vec(), b.to_vec()));
                    }
                }
                Ok((dims, bad))
            })
            .collect();
        let mut table = Vec::with_capacity(sets.len());
        for r in rows {
            let (dims, bad) = r?;
            f.freiman.extend(bad);
            table.push(dims);
        }
        let inverse: Vec<u64> = masks.iter().map(|&m| mask_image(&g, m, |x| g.inv(x))).collect();
        let duality: Vec<String> = sets
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, a)| {
                let (table, inverse, sets) = (&table, &inverse, &sets);
                let name = &name;
                sets.iter().enumerate().filter_map(move |(j, b)| {
                    let r = vcdr(a, b, DEFAULT_CAP).expect("non-empty").dimension;
                    let want = table[idx(inverse[i])][idx(inverse[j])] as usize;
                    (r != want).then(|| format!("{name} {:?} {:?}: vcdr {r}, inverses {want}", a.to_vec(), b.to_vec()))
                })
            })
            .collect();
        f.duality.extend(duality);
        for t in g.elements() {
            let left: Vec<u64> = masks.iter().map(|&m| mask_image(&g, m, |x| g.op(t, x))).collect();
            let right: Vec<u64> = masks.iter().map(|&m| mask_image(&g, m, |x| g.op(x, t))).collect();
            for i in 0..masks.len() {
                for j in 0..masks.len() {
                    let d = table[i][j];
                    if table[idx(left[i])][idx(left[j])] != d || table[idx(right[i])][idx(right[j])] != d {
                        f.translation.push(format!("{name} masks {} {} t={t}", masks[i], masks[j]));
                    }
                }
            }
        }
        cases += masks.len() * masks.len();
    }
    Ok(cases)
}

fn invariance(ctx: &Context) -> Result<Outcome> {
    let mut f = Failures::default();
    let random = random_instances(ctx, &mut f)?;
    let exhaustive_pairs = exhaustive(ctx, &mut f)?;
    let cases = random + exhaustive_pairs;
    Ok(Outcome {
        clauses: vec![
            Clause::new("matches_brute_force", random, &f.oracle),
            Clause::new("translation", cases, &f.translation),
            Clause::new("inverse_duality", cases, &f.duality),
            Clause::new("freiman_2_isomorphism", cases, &f.freiman),
        ],
        report: json!({"random_instances": random, "exhaustive_pairs": exhaustive_pairs}),
    })
}
