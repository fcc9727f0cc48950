mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vcgrp_core::fourier::{chang_cover, dft, inverse_dft, large_spectrum, parseval_gap, transforms};
use vcgrp_core::setcalc::naive_convolve;
use vcgrp_core::{CountFn, Group};

fn groups_up_to_4096() -> Vec<Vec<usize>> {
    vec![
        vec![],
        vec![2],
        vec![97],
        vec![360],
        vec![4096],
        vec![2; 12],
        vec![3; 7],
        vec![64, 64],
        vec![16, 16, 16],
        vec![7, 9, 11],
        vec![1009],
        vec![4, 1021],
    ]
}

fn rel_err(x: &[Complex64], y: &[Complex64]) -> f64 {
    let scale = y.iter().map(|c| c.norm()).fold(1.0f64, f64::max);
    x.iter().zip(y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale
}

#[test]
fn orthogonality_and_dual_closure() {
    for moduli in [vec![12], vec![2, 2, 3], vec![5, 5], vec![64, 64]] {
        let g = Group::product(&moduli).unwrap();
        let n = g.order() as f64;
        for gamma in g.elements().step_by(7) {
            let s: Complex64 = g.elements().map(|x| g.char_eval(gamma, x).unwrap()).sum();
            let expect = if gamma == g.dual_identity() { n } else { 0.0 };
            assert!((s - Complex64::new(expect, 0.0)).norm() <= 1e-9 * n, "{moduli:?} γ={gamma}");
        }
        for (a, b) in [(1, 2), (3, 5), (g.order() - 1, 1)] {
            let ab = g.dual_op(a, b).unwrap();
            for x in g.elements().step_by(5) {
                let lhs = g.char_eval(a, x).unwrap() * g.char_eval(b, x).unwrap();
                assert!((lhs - g.char_eval(ab, x).unwrap()).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn table_groups_are_associative() {
    for g in [Group::symmetric(4).unwrap(), Group::dihedral(12).unwrap(), Group::symmetric(3).unwrap()] {
        assert!(g.order() <= 24);
        for x in g.elements() {
            for y in g.elements() {
                let xy = g.op(x, y);
                for z in g.elements() {
                    assert_eq!(g.op(xy, z), g.op(x, g.op(y, z)));
                }
            }
        }
    }
}

#[test]
fn fourier_identities_on_random_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for moduli in groups_up_to_4096() {
        let g = Group::product(&moduli).unwrap();
        let n = g.order();
        for _ in 0..100 {
            let f: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let back = inverse_dft(&g, &dft(&g, &f).unwrap()).unwrap();
            assert!(rel_err(&back, &f) <= 1e-9, "round trip on {moduli:?}");
            let norm: f64 = f.iter().map(|c| c.norm_sqr()).sum();
            assert!(parseval_gap(&g, &f).unwrap() <= 1e-9 * norm.max(1.0), "Parseval on {moduli:?}");
        }
    }
}

#[test]
fn convolution_identity_and_backend_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let naive = transforms().get("naive").unwrap();
    let fast = transforms().get("fast").unwrap();
    for moduli in groups_up_to_4096() {
        let g = Group::product(&moduli).unwrap();
        let n = g.order();
        for _ in 0..3 {
            let fi: Vec<i64> = (0..n).map(|_| rng.random_range(-9..10)).collect();
            let hi: Vec<i64> = (0..n).map(|_| rng.random_range(-9..10)).collect();
            let conv = naive_convolve(&CountFn::new(&g, fi.clone(), 1).unwrap(), &CountFn::new(&g, hi.clone(), 1).unwrap()).unwrap();
            let c = |v: &[i64]| v.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect::<Vec<_>>();
            let (ff, hh) = (fast.forward(&g, &c(&fi)).unwrap(), fast.forward(&g, &c(&hi)).unwrap());
            let prod: Vec<Complex64> = ff.iter().zip(&hh).map(|(a, b)| a * b).collect();
            assert!(rel_err(&fast.forward(&g, &c(conv.values())).unwrap(), &prod) <= 1e-9);
            let nf = naive.forward(&g, &c(&fi)).unwrap();
            assert!(rel_err(&nf, &ff) <= 1e-9, "naive vs fast on {moduli:?}");
            let rounded: Vec<i64> = fast.inverse(&g, &prod).unwrap().iter().map(|v| v.re.round() as i64).collect();
            assert_eq!(rounded, conv.values());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn chang_cover_is_dissociated_and_spans(n in 8usize..200, picks in proptest::collection::vec(any::<usize>(), 1..12)) {
        let g = Group::cyclic(n).unwrap();
        let mut f = vec![0.0; n];
        for p in &picks {
            f[p % n] = 1.0;
        }
        let total: f64 = f.iter().sum();
        f.iter_mut().for_each(|v| *v /= total);
        let spec = large_spectrum(&g, &f, 0.5).unwrap();
        let cover = chang_cover(&g, &spec).unwrap();
        prop_assert!(cover.certified);
        let k = cover.basis.len() as u32;
        if 3u64.pow(k) <= 10_000_000 {
            // No non-trivial {0, ±1} combination vanishes.
            for code in 1..3u64.pow(k) {
                let mut c = code;
                let mut acc = g.identity();
                for &l in &cover.basis {
                    match c % 3 {
                        1 => acc = g.op(acc, l),
                        2 => acc = g.op(acc, g.inv(l)),
                        _ => {}
                    }
                    c /= 3;
                }
                prop_assert_ne!(acc, g.identity());
            }
        }
    }
}
