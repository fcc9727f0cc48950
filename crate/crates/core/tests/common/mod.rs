//! Shared fixtures and brute-force oracles for the integration tests. The
//! oracles deliberately avoid the library's search code.
#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use vcgrp_core::{Element, GSet, Group};

/// Small groups covering cyclic, product, vector-space and table kinds.
pub fn catalog() -> Vec<Arc<Group>> {
    vec![
        Group::cyclic(7).unwrap(),
        Group::cyclic(12).unwrap(),
        Group::product(&[2, 6]).unwrap(),
        Group::vector_space(2, 4).unwrap(),
        Group::vector_space(3, 2).unwrap(),
        Group::symmetric(3).unwrap(),
        Group::dihedral(5).unwrap(),
        Group::dihedral(6).unwrap(),
    ]
}

pub fn small_groups() -> Vec<Arc<Group>> {
    let mut out: Vec<_> = (2..=12).map(|n| Group::cyclic(n).unwrap()).collect();
    out.push(Group::product(&[2, 2]).unwrap());
    out.push(Group::product(&[2, 4]).unwrap());
    out.push(Group::vector_space(2, 3).unwrap());
    out.push(Group::product(&[3, 3]).unwrap());
    out.push(Group::product(&[2, 6]).unwrap());
    out.push(Group::symmetric(3).unwrap());
    out.push(Group::dihedral(4).unwrap());
    out.push(Group::dihedral(5).unwrap());
    out.push(Group::dihedral(6).unwrap());
    out
}

/// Every non-empty subset of a group of order ≤ 16.
pub fn all_nonempty_subsets(g: &Arc<Group>) -> Vec<GSet> {
    let n = g.order();
    assert!(n <= 16);
    (1u32..(1 << n))
        .map(|mask| GSet::new(g, (0..n).filter(|i| mask >> i & 1 == 1)).unwrap())
        .collect()
}

/// A group from the catalog with a non-empty subset drawn from a bit mask.
pub fn group_and_set() -> impl Strategy<Value = (Arc<Group>, GSet)> {
    (0..catalog().len(), any::<u64>()).prop_map(|(i, bits)| {
        let g = catalog()[i].clone();
        let set = subset_from_bits(&g, bits);
        (g, set)
    })
}

pub fn group_and_two_sets() -> impl Strategy<Value = (Arc<Group>, GSet, GSet, Element)> {
    (0..catalog().len(), any::<u64>(), any::<u64>(), any::<usize>()).prop_map(|(i, x, y, t)| {
        let g = catalog()[i].clone();
        let a = subset_from_bits(&g, x);
        let b = subset_from_bits(&g, y);
        let t = t % g.order();
        (g, a, b, t)
    })
}

/// Never empty: an all-zero mask becomes `{identity}`.
pub fn subset_from_bits(g: &Arc<Group>, bits: u64) -> GSet {
    let n = g.order();
    let elems: Vec<Element> = (0..n).filter(|&i| bits.rotate_left(i as u32) & 1 == 1).collect();
    if elems.is_empty() {
        GSet::new(g, [g.identity()]).unwrap()
    } else {
        GSet::new(g, elems).unwrap()
    }
}

/// VC-dimension of an explicit family of subsets of `ground` by trying
/// every subset of the ground set in increasing size.
pub fn brute_vc(ground: &[Element], family: &[HashSet<Element>]) -> usize {
    let n = ground.len();
    assert!(n <= 20, "brute-force oracle limited to 20 ground points");
    let mut best = 0;
    for k in 1..=n {
        let mut any = false;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let pts: Vec<Element> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ground[i]).collect();
            let traces: HashSet<Vec<bool>> = family
                .iter()
                .map(|f| pts.iter().map(|p| f.contains(p)).collect())
                .collect();
            if traces.len() == 1 << k {
                any = true;
                break;
            }
        }
        if !any {
            break;
        }
        best = k;
    }
    best
}

/// `vcd(A, B)` straight from the definition.
pub fn brute_vcd(a: &GSet, b: &GSet) -> usize {
    let g = a.group();
    let mut xs = HashSet::new();
    for x in a.iter() {
        for y in b.iter() {
            xs.insert(g.op(x, g.inv(y)));
        }
    }
    let family: Vec<HashSet<Element>> = xs
        .iter()
        .map(|&x| b.iter().map(|y| g.op(x, y)).filter(|z| a.contains(*z)).collect())
        .collect();
    brute_vc(&a.to_vec(), &family)
}

/// `vcd(G, A)` straight from the definition.
pub fn brute_vcd_global(a: &GSet) -> usize {
    let g = a.group();
    let family: Vec<HashSet<Element>> = g.elements().map(|x| a.iter().map(|y| g.op(x, y)).collect()).collect();
    let ground: Vec<Element> = g.elements().collect();
    if ground.len() <= 20 {
        brute_vc(&ground, &family)
    } else {
        panic!("group too large for the global oracle")
    }
}

/// `a⁻¹A` closed under the group law, for some (any) `a ∈ A`.
pub fn is_coset(a: &GSet) -> bool {
    let g = a.group();
    let t = a.first().unwrap();
    let h: Vec<Element> = a.iter().map(|x| g.op(g.inv(t), x)).collect();
    let hs: HashSet<Element> = h.iter().copied().collect();
    h.iter().all(|&x| h.iter().all(|&y| hs.contains(&g.op(x, y))))
}

/// `|A ∩ xB|` for every `x` by direct counting.
pub fn brute_skew_counts(a: &GSet, b: &GSet) -> Vec<i64> {
    let g = a.group();
    g.elements()
        .map(|x| b.iter().filter(|&y| a.contains(g.op(x, y))).count() as i64)
        .collect()
}
