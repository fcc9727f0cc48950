use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use vcgrp_core::bohr::{find_regular_dilate, regularity_defect, size_lower_bound_check, BohrSpec, DEFAULT_GRID_POINTS};
use vcgrp_core::fourier::{dft, inverse_dft, transforms};
use vcgrp_core::rational::{format_rational, to_f64};
use vcgrp_core::{Group, Rational, Result};

use super::criterion;
use crate::instances::to_set;
use crate::{oracles, Clause, Context, Outcome};

criterion!(FourierIdentities, 6, "fourier", 120, "Fourier inversion, convolution and Parseval", fourier);
criterion!(BohrStructure, 7, "bohr", 120, "Bohr set size, annihilator and regular dilates", bohr);

const TOL: f64 = 1e-9;

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn rel_err(got: &[Complex64], want: &[Complex64]) -> f64 {
    let diff: Vec<Complex64> = got.iter().zip(want).map(|(a, b)| a - b).collect();
    norm(&diff) / norm(want).max(f64::MIN_POSITIVE)
}

fn random_fn(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Abelian groups of order at most 4096 with at most three cyclic factors.
const FOURIER_GROUPS: &[&[usize]] = &[
    &[],
    &[2],
    &[7],
    &[2, 6],
    &[3, 5, 7],
    &[360],
    &[6, 10, 12],
    &[1009],
    &[32, 32],
    &[2, 2048],
    &[4, 1021],
    &[64, 64],
    &[16, 16, 16],
    &[4096],
];

fn fourier(ctx: &Context) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.derive(6));
    let per_group = ctx.count(100, 4);
    let (mut round_trip, mut parseval, mut convolution, mut oracle, mut rounding) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut worst = [0f64; 3];
    let mut cases = 0;
    let naive = transforms().get("naive")?;
    let fast = transforms().get("fast")?;
    for moduli in FOURIER_GROUPS {
        let g = Group::product(moduli)?;
        let n = g.order();
        let tag = format!("{moduli:?}");
        for i in 0..per_group {
            let f = random_fn(n, &mut rng);
            let h = random_fn(n, &mut rng);
            let ff = dft(&g, &f)?;
            let hh = dft(&g, &h)?;
            cases += 1;
            let e = rel_err(&inverse_dft(&g, &ff)?, &f);
            worst[0] = worst[0].max(e);
            if e > TOL {
                round_trip.push(format!("{tag} #{i}: relative error {e:e}"));
            }
            // E_γ |f̂(γ)|² = ‖f‖₂².
            let lhs = ff.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
            let rhs = f.iter().map(|c| c.norm_sqr()).sum::<f64>();
            let e = (lhs - rhs).abs() / rhs;
            worst[1] = worst[1].max(e);
            if e > TOL {
                parseval.push(format!("{tag} #{i}: relative gap {e:e}"));
            }
            // (f * h)^ = f̂ ĥ, with f * h summed directly.
            let conv = dft(&g, &oracles::convolve(&g, &f, &h))?;
            let prod: Vec<Complex64> = ff.iter().zip(&hh).map(|(a, b)| a * b).collect();
            let e = rel_err(&conv, &prod);
            worst[2] = worst[2].max(e);
            if e > TOL {
                convolution.push(format!("{tag} #{i}: relative error {e:e}"));
            }
            if i < 2 {
                // The default transform against the definition and both backends.
                let mut refs = vec![naive.forward(&g, &f)?, fast.forward(&g, &f)?];
                if n <= 1024 {
                    refs.push(oracles::dft(&g, &f));
                }
                for (j, r) in refs.iter().enumerate() {
                    let e = rel_err(&ff, r);
                    if e > TOL {
                        oracle.push(format!("{tag} #{i} reference {j}: relative error {e:e}"));
                    }
                }
            }
        }
        // Integer inputs: both backends round to the exact convolution.
        let pairs = if n > 1024 { ctx.count(3, 1) } else { ctx.count(10, 2) };
        for i in 0..pairs {
            let f: Vec<i64> = (0..n).map(|_| rng.random_range(0..10)).collect();
            let h: Vec<i64> = (0..n).map(|_| rng.random_range(0..10)).collect();
            let exact = oracles::convolve(&g, &f, &h);
            let fc: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect();
            let hc: Vec<Complex64> = h.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect();
            for t in [&naive, &fast] {
                let prod: Vec<Complex64> = t
                    .forward(&g, &fc)?
                    .iter()
                    .zip(&t.forward(&g, &hc)?)
                    .map(|(a, b)| a * b)
                    .collect();
                let back = t.inverse(&g, &prod)?;
                let off = back
                    .iter()
                    .zip(&exact)
                    .map(|(v, &x)| (v.re - x as f64).abs().max(v.im.abs()))
                    .fold(0.0, f64::max);
                let rounded: Vec<i64> = back.iter().map(|v| v.re.round() as i64).collect();
                if off >= 0.5 || rounded != exact {
                    rounding.push(format!("{tag} #{i} {}: max distance {off}", t.name()));
                }
            }
        }
    }
    Ok(Outcome {
        clauses: vec![
            Clause::new("round_trip", cases, &round_trip),
            Clause::new("parseval", cases, &parseval),
            Clause::new("convolution_identity", cases, &convolution),
            Clause::new("matches_definition", cases, &oracle),
            Clause::new("integer_rounding", cases, &rounding),
        ],
        report: json!({"groups": FOURIER_GROUPS.len(), "functions_per_group": per_group}),
    })
}

const BOHR_GROUPS: &[&[usize]] = &[&[100], &[1009], &[12, 10], &[3, 3, 3, 3, 3], &[2, 2, 2, 2, 2, 2, 2, 2], &[4, 6, 5]];

fn random_spec(rng: &mut ChaCha8Rng) -> Result<BohrSpec> {
    let moduli = BOHR_GROUPS[rng.random_range(0..BOHR_GROUPS.len())];
    let g = Group::product(moduli)?;
    let rank = rng.random_range(1..=3);
    let freqs: Vec<usize> = (0..rank).map(|_| rng.random_range(1..g.order())).collect();
    BohrSpec::new(&g, freqs, Rational::new(rng.random_range(1..=64), 64))
}

fn describe(spec: &BohrSpec) -> String {
    format!(
        "{:?} freqs {:?} radius {}",
        spec.group().moduli().unwrap_or_default(),
        spec.freqs(),
        format_rational(&spec.radius())
    )
}

fn bohr(ctx: &Context) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.derive(7));
    let (mut size, mut arc, mut count, mut annihilator, mut dilate) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let n_size = ctx.count(200, 20);
    let mut specs = Vec::new();
    for _ in 0..n_size {
        let spec = random_spec(&mut rng)?;
        let g = spec.group().clone();
        let report = size_lower_bound_check(&spec)?;
        // Recount |B| in floating point; only ties within 1e-12 may differ.
        let widths: Vec<f64> = g
            .elements()
            .map(|x| spec.freqs().iter().map(|&gm| oracles::char_distance(&g, gm, x)).fold(0.0, f64::max))
            .collect();
        let r = to_f64(&spec.radius());
        let lo = widths.iter().filter(|&&w| w <= r - 1e-12).count();
        let hi = widths.iter().filter(|&&w| w <= r + 1e-12).count();
        if report.size < lo || report.size > hi {
            count.push(format!("{}: size {} outside [{lo}, {hi}]", describe(&spec), report.size));
        }
        let d = spec.rank() as i32;
        let bound = (2.0 * r / std::f64::consts::PI).powi(d) * g.order() as f64;
        if (report.size as f64) < bound || !report.pass {
            size.push(format!("{}: |B| = {} < {bound:.2}", describe(&spec), report.size));
        }
        let arc_bound = (r / std::f64::consts::TAU).powi(d) * g.order() as f64;
        if (report.size as f64) < arc_bound || !report.arc_pass {
            arc.push(format!("{}: |B| = {} < {arc_bound:.2}", describe(&spec), report.size));
        }
        let ann = oracles::annihilator(&g, spec.freqs());
        let realized = to_set(&spec.realize());
        if to_set(&spec.annihilator()) != ann || !ann.is_subset(&realized) {
            annihilator.push(describe(&spec));
        }
        specs.push(json!({"spec": spec, "size": report.size, "bound": report.bound, "pass": report.pass}));
    }
    let n_dilate = ctx.count(100, 10);
    let mut taus = Vec::new();
    for _ in 0..n_dilate {
        let spec = random_spec(&mut rng)?;
        let g = spec.group().clone();
        match find_regular_dilate(&spec) {
            Ok(rd) => {
                let defect = regularity_defect(&rd.spec, DEFAULT_GRID_POINTS);
                let recount = oracles::regularity_violation(&g, rd.spec.freqs(), to_f64(&rd.spec.radius()), 1e-9);
                let tau_ok = rd.tau >= Rational::new(1, 2) && rd.tau <= Rational::from_integer(1);
                if rd.defect != 0.0 || defect != 0.0 || recount.is_some() || !tau_ok {
                    dilate.push(format!(
                        "{}: τ = {}, defect {defect}, violation at {recount:?}",
                        describe(&spec),
                        format_rational(&rd.tau)
                    ));
                }
                taus.push(format_rational(&rd.tau));
            }
            Err(e) => dilate.push(format!("{}: {e}", describe(&spec))),
        }
    }
    Ok(Outcome {
        clauses: vec![
            Clause::new("size_bound", n_size, &size),
            Clause::new("size_bound_arc", n_size, &arc),
            Clause::new("size_recount", n_size, &count),
            Clause::new("annihilator_inside", n_size, &annihilator),
            Clause::new("regular_dilate", n_dilate, &dilate),
        ],
        report: json!({"specs": specs, "dilates": taus}),
    })
}
