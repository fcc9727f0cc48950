use std::sync::Arc;

use proptest::prelude::*;
use vcgrp_core::bohr::{find_regular_dilate, regularity_defect, subgroup_inside, BohrSpec, DEFAULT_GRID_POINTS};
use vcgrp_core::setcalc::is_subgroup;
use vcgrp_core::{Group, Rational};

fn groups() -> Vec<Arc<Group>> {
    vec![
        Group::cyclic(101).unwrap(),
        Group::cyclic(360).unwrap(),
        Group::product(&[6, 10]).unwrap(),
        Group::vector_space(3, 4).unwrap(),
        Group::product(&[2, 2, 50]).unwrap(),
    ]
}

fn spec_strategy(max_radius: i64) -> impl Strategy<Value = BohrSpec> {
    (0..groups().len(), proptest::collection::vec(any::<usize>(), 1..=3), 0..=max_radius).prop_map(|(i, fs, r)| {
        let g = groups()[i].clone();
        let n = g.order();
        BohrSpec::new(&g, fs.into_iter().map(|f| f % n), Rational::new(r, 64)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn annihilator_is_a_subgroup_inside(spec in spec_strategy(128)) {
        let ann = spec.annihilator();
        prop_assert!(is_subgroup(&ann));
        prop_assert!(ann.is_subset(&spec.realize()));
        let report = subgroup_inside(&spec);
        prop_assert!(report.subgroup.is_subset(&spec.realize()));
    }

    #[test]
    fn dilates_are_nested(spec in spec_strategy(128), a in 0i64..=16, b in 0i64..=16) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small = spec.dilate(Rational::new(lo, 16)).unwrap().realize();
        let big = spec.dilate(Rational::new(hi, 16)).unwrap().realize();
        prop_assert!(small.is_subset(&big));
    }

    #[test]
    fn membership_matches_floating_point_away_from_ties(spec in spec_strategy(128)) {
        let g = spec.group().clone();
        let rho = vcgrp_core::rational::to_f64(&spec.radius());
        let set = spec.realize();
        for x in g.elements() {
            let d = spec
                .freqs()
                .iter()
                .map(|&f| (g.char_eval(f, x).unwrap() - num_complex::Complex64::new(1.0, 0.0)).norm())
                .fold(0.0f64, f64::max);
            if (d - rho).abs() > 1e-9 {
                prop_assert_eq!(set.contains(x), d <= rho, "x = {}", x);
            }
        }
    }

    #[test]
    fn regular_dilates_have_zero_defect(spec in spec_strategy(128)) {
        let r = find_regular_dilate(&spec).unwrap();
        prop_assert!(r.tau >= Rational::new(1, 2) && r.tau <= Rational::from_integer(1));
        prop_assert_eq!(regularity_defect(&r.spec, DEFAULT_GRID_POINTS), 0.0);
    }
}
