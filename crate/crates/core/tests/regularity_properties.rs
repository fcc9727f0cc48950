mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use vcgrp_core::regularity::{bogolyubov_subspace, regularity_bohr, regularity_subspace, BogolyubovMode, RegularityConfig};
use vcgrp_core::setcalc::{is_subgroup, product_set, quotient_set};
use vcgrp_core::vc::{vcd_self, DEFAULT_CAP};
use vcgrp_core::{GSet, Group, Rational};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn outputs_are_valid_on_random_sets(n in prop_oneof![Just(61usize), Just(96), Just(128)], bits in proptest::collection::vec(any::<bool>(), 128), eps in 1i64..4, nu in 0i64..=2, seed in any::<u64>()) {
        let g = Group::cyclic(n).unwrap();
        let a = GSet::new(&g, (0..n).filter(|&i| bits[i])).unwrap();
        prop_assume!(!a.is_empty());
        let eps = Rational::new(eps, 4);
        let dec = regularity_bohr(&a, &eps, &Rational::new(nu, 2), seed, &RegularityConfig::default()).unwrap();
        prop_assert!(dec.a_prime.is_subset(&a));
        let h = dec.h.realize();
        prop_assert_eq!(dec.w.clone(), if dec.a_prime.is_empty() { GSet::empty(&g) } else { product_set(&dec.a_prime, &h).unwrap() });
        prop_assert!(dec.w.is_subset(&product_set(&a, &h).unwrap()));
        prop_assert_eq!(dec.symdiff, a.symmetric_difference(&dec.w).unwrap().len());
        prop_assert_eq!(dec.symdiff_ratio, Rational::new(dec.symdiff as i64, a.len() as i64));
        prop_assert_eq!(dec.checks.h_in_difference_set, h.is_subset(&quotient_set(&a, &a).unwrap()));
    }
}

/// All unions of cosets of non-trivial subgroups of `(Z/2)^4`.
#[test]
fn coset_unions_in_small_vector_space() {
    let g = Group::vector_space(2, 4).unwrap();
    let subgroups: Vec<GSet> = common::all_nonempty_subsets(&g).into_iter().filter(|s| s.len() > 1 && is_subgroup(s)).collect();
    let mut seen = HashSet::new();
    for s in &subgroups {
        let mut cosets: Vec<GSet> = Vec::new();
        for x in g.elements() {
            let c = s.left_translate(x).unwrap();
            if !cosets.contains(&c) {
                cosets.push(c);
            }
        }
        let index = cosets.len();
        for mask in 1u32..(1 << index) {
            let a = (0..index)
                .filter(|i| mask >> i & 1 == 1)
                .fold(GSet::empty(&g), |acc, i| acc.union(&cosets[i]).unwrap());
            if !seen.insert(a.to_vec()) {
                continue;
            }
            let d = vcd_self(&a, DEFAULT_CAP).unwrap().dimension;
            if (1usize << d) > index {
                continue;
            }
            let dec = regularity_subspace(&a, &Rational::new(1, 4), 3, &RegularityConfig::default()).unwrap();
            assert_eq!(dec.symdiff, 0, "{a:?}");
            assert!(dec.checks.h_in_difference_set);
        }
    }
}

#[test]
fn larger_epsilon_does_not_raise_codimension() {
    let g = Group::vector_space(3, 4).unwrap();
    let sub = GSet::from_predicate(&g, |x| g.coords(x).unwrap()[0] == 0);
    let a = sub.union(&sub.left_translate(1).unwrap()).unwrap();
    let mut last = u32::MAX;
    for e in [1i64, 2, 4, 8] {
        let dec = regularity_subspace(&a, &Rational::new(e, 10), 5, &RegularityConfig::default()).unwrap();
        let c = dec.codimension.unwrap();
        assert!(c <= last);
        last = c;
    }
}

#[test]
fn doubling_pullback_is_a_subspace() {
    let g = Group::vector_space(5, 4).unwrap();
    let x = g.from_coords(&[1, 0, 0, 0]).unwrap();
    let y = g.from_coords(&[0, 1, 1, 0]).unwrap();
    let a = GSet::new(&g, (0..3).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| g.op(g.pow(x, i), g.pow(y, j)))).unwrap();
    let out = bogolyubov_subspace(&a, BogolyubovMode::Doubling, 4, &RegularityConfig::default()).unwrap();
    assert!(out.contained);
    let pb = out.pullback.unwrap();
    assert!(pb.is_subspace && pb.difference_preserved && pb.bijective);
}
