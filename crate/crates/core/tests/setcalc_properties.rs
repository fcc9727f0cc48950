mod common;

use common::*;
use proptest::prelude::*;
use vcgrp_core::rational::{format_rational, parse_rational};
use vcgrp_core::setcalc::{
    convolution_backends, linf_shift_deviation, naive_convolve, quotient_set, skew_convolve_counts,
};
use vcgrp_core::{CountFn, GSet, Group, Rational};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn skew_counts_match_definition((_g, a, b, _t) in group_and_two_sets()) {
        let f = skew_convolve_counts(&a, &b).unwrap();
        prop_assert_eq!(f.values().to_vec(), brute_skew_counts(&a, &b));
        prop_assert_eq!(f.support(), quotient_set(&a, &b).unwrap());
        let mass: i64 = f.values().iter().sum();
        prop_assert_eq!(mass as usize, a.len() * b.len());
    }

    #[test]
    fn shift_deviation_at_most_one((_g, a, b, t) in group_and_two_sets()) {
        let f = skew_convolve_counts(&a, &b).unwrap();
        prop_assert!(linf_shift_deviation(&f, t).unwrap() <= Rational::from_integer(1));
    }

    #[test]
    fn support_in_large_groups(n in 64usize..1024, xs in proptest::collection::vec(any::<usize>(), 1..40), ys in proptest::collection::vec(any::<usize>(), 1..40)) {
        let g = Group::cyclic(n).unwrap();
        let a = GSet::new(&g, xs.iter().map(|x| x % n)).unwrap();
        let b = GSet::new(&g, ys.iter().map(|y| y % n)).unwrap();
        prop_assert_eq!(skew_convolve_counts(&a, &b).unwrap().support(), quotient_set(&a, &b).unwrap());
    }

    #[test]
    fn rationals_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = Rational::new(p, q);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }
}

#[test]
fn backends_agree_on_large_groups() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for moduli in [vec![4096], vec![2; 12], vec![64, 64], vec![1009], vec![3, 5, 7, 11]] {
        let g = Group::product(&moduli).unwrap();
        let n = g.order();
        for _ in 0..3 {
            let f = CountFn::new(&g, (0..n).map(|_| rng.random_range(-50..50)).collect(), 1).unwrap();
            let h = CountFn::new(&g, (0..n).map(|_| rng.random_range(0..3)).collect(), 1).unwrap();
            let reference = naive_convolve(&f, &h).unwrap();
            for name in convolution_backends().names() {
                let out = convolution_backends().get(name).unwrap().convolve(&f, &h).unwrap();
                assert_eq!(out.values(), reference.values(), "{name} on {moduli:?}");
            }
        }
    }
}
