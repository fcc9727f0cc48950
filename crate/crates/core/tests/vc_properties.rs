mod common;

use common::*;
use proptest::prelude::*;
use vcgrp_core::vc::{vcd, vcd_global, vcd_scoped, vcd_self, vcdr, Scope, DEFAULT_CAP};
use vcgrp_core::{GSet, Group};

const CAP: usize = DEFAULT_CAP;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_definition((_g, a, b, _t) in group_and_two_sets()) {
        prop_assert_eq!(vcd(&a, &b, CAP).unwrap().dimension, brute_vcd(&a, &b));
        prop_assert_eq!(vcd_global(&a, CAP).unwrap().dimension, brute_vcd_global(&a));
    }

    #[test]
    fn translation_invariance((_g, a, b, t) in group_and_two_sets()) {
        let d = vcd(&a, &b, CAP).unwrap().dimension;
        let right = vcd(&a.right_translate(t).unwrap(), &b.right_translate(t).unwrap(), CAP).unwrap().dimension;
        let left = vcd(&a.left_translate(t).unwrap(), &b.left_translate(t).unwrap(), CAP).unwrap().dimension;
        prop_assert_eq!(d, right);
        prop_assert_eq!(d, left);
    }

    #[test]
    fn inverse_duality((_g, a, b, _t) in group_and_two_sets()) {
        let lhs = vcd(&a.inverse(), &b.inverse(), CAP).unwrap().dimension;
        prop_assert_eq!(lhs, vcdr(&a, &b, CAP).unwrap().dimension);
        if a.group().is_abelian() {
            prop_assert_eq!(vcd_self(&a.inverse(), CAP).unwrap().dimension, vcd_self(&a, CAP).unwrap().dimension);
        }
    }

    #[test]
    fn sandwiches((_g, a, b, _t) in group_and_two_sets()) {
        let d = vcd(&a, &b, CAP).unwrap().dimension;
        let global = vcd_scoped(&a, &b, Scope::Global, CAP).unwrap().dimension;
        prop_assert!(global <= d + 1 && d <= global);
        let s = vcd_self(&a, CAP).unwrap().dimension;
        let sg = vcd_global(&a, CAP).unwrap().dimension;
        prop_assert!(s <= sg && sg <= s + 1);
    }

    #[test]
    fn witness_is_shattered((_g, a, b, _t) in group_and_two_sets()) {
        let r = vcd(&a, &b, CAP).unwrap();
        prop_assert_eq!(r.witness.len(), r.dimension);
        prop_assert!(r.witness.iter().all(|&x| a.contains(x)));
        let w = GSet::new(a.group(), r.witness.clone()).unwrap();
        let fam = vcgrp_core::vc::translate_family(&a, &b, Scope::Restricted).unwrap();
        prop_assert!(vcgrp_core::vc::shatters(&fam, &w).unwrap());
    }
}

#[test]
fn monotone_in_the_ground_set_exhaustively() {
    for g in [Group::cyclic(8).unwrap(), Group::symmetric(3).unwrap(), Group::product(&[2, 4]).unwrap()] {
        let subsets = all_nonempty_subsets(&g);
        for b in subsets.iter().step_by(17) {
            let dims: Vec<usize> = subsets.iter().map(|a| vcd(a, b, CAP).unwrap().dimension).collect();
            // Index i is the subset with bit mask i + 1; one-point extensions suffice.
            for (i, a) in subsets.iter().enumerate() {
                let mask = i + 1;
                for x in 0..g.order() {
                    if mask >> x & 1 == 0 {
                        let bigger = (mask | 1 << x) - 1;
                        assert!(dims[i] <= dims[bigger], "{a:?} ⊂ +{x} with B = {b:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn monotone_up_to_order_twelve() {
    for g in [Group::cyclic(12).unwrap(), Group::dihedral(6).unwrap(), Group::cyclic(11).unwrap()] {
        let subsets = all_nonempty_subsets(&g);
        let b = GSet::new(&g, [0, 1, 3, 7]).unwrap();
        let dims: Vec<usize> = subsets.iter().map(|a| vcd(a, &b, CAP).unwrap().dimension).collect();
        for i in 0..subsets.len() {
            let mask = i + 1;
            for x in 0..g.order() {
                if mask >> x & 1 == 0 {
                    assert!(dims[i] <= dims[(mask | 1 << x) - 1]);
                }
            }
        }
    }
}

#[test]
fn vcd_zero_exactly_on_cosets() {
    for g in [
        Group::cyclic(6).unwrap(),
        Group::cyclic(8).unwrap(),
        Group::product(&[2, 4]).unwrap(),
        Group::symmetric(3).unwrap(),
    ] {
        for a in all_nonempty_subsets(&g) {
            assert_eq!(vcd_self(&a, CAP).unwrap().dimension == 0, is_coset(&a), "{a:?}");
        }
    }
}

#[test]
fn progressions_have_dimension_two() {
    let g = Group::cyclic(1000).unwrap();
    for len in 3..=12usize {
        for step in [1usize, 3, 7, 20] {
            let a = GSet::new(&g, (0..len).map(|i| i * step)).unwrap();
            assert_eq!(vcd_self(&a, CAP).unwrap().dimension, 2);
            assert_eq!(vcd_global(&a, CAP).unwrap().dimension, 2);
        }
    }
    let pair = GSet::new(&g, [5, 9]).unwrap();
    assert_eq!(vcd_self(&pair, CAP).unwrap().dimension, 1);
}
