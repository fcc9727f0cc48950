//! The k-order property: `a_1..a_k, b_1..b_k` with `a_i b_j ∈ A ⇔ i ≤ j`.
//!
//! The search chooses `b_1, b_2, …` in turn. Writing `col(b) = {a : ab ∈ A}`,
//! row `i` needs `a_i ∈ col(b_j)` for `j ≥ i` and `a_i ∉ col(b_j)` for
//! `j < i`, so each choice of `b_j` shrinks the candidate sets of the rows
//! already opened and of all rows still to come. Replacing `(a_i, b_j)` by
//! `(a_i g, g⁻¹ b_j)` preserves a witness, so `b_1` is the identity.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::setcalc::GSet;
use crate::vc::{vcd_global, vcd_self, DEFAULT_CAP};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityWitness {
    pub k: usize,
    pub a: Vec<Element>,
    pub b: Vec<Element>,
    pub verified: bool,
}

impl StabilityWitness {
    /// Checks the full `k × k` membership table.
    pub fn new(set: &GSet, a: Vec<Element>, b: Vec<Element>) -> StabilityWitness {
        let g = set.group();
        let verified = a.len() == b.len()
            && a.iter().enumerate().all(|(i, &ai)| {
                b.iter()
                    .enumerate()
                    .all(|(j, &bj)| set.contains(g.op(ai, bj)) == (i <= j))
            });
        StabilityWitness {
            k: a.len(),
            a,
            b,
            verified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StabilityStatus {
    Stable { nodes: u64 },
    Unstable { witness: StabilityWitness, nodes: u64 },
    /// The node budget ran out first.
    Unknown { nodes: u64 },
}

struct Search<'a> {
    group: &'a Group,
    k: usize,
    columns: Vec<FixedBitSet>,
    budget: u64,
    nodes: u64,
    b: Vec<Element>,
}

enum Outcome {
    Found(Vec<FixedBitSet>),
    Exhausted,
    OutOfBudget,
}

impl Search<'_> {
    /// `rows[i]` are the candidates for `a_i` (rows opened so far), `rest`
    /// the candidates for rows not yet opened.
    fn extend(&mut self, rows: Vec<FixedBitSet>, rest: FixedBitSet) -> Outcome {
        let j = self.b.len();
        if j == self.k {
            return Outcome::Found(rows);
        }
        for bj in 0..self.group.order() {
            if j == 0 && bj != self.group.identity() {
                continue;
            }
            if self.b.contains(&bj) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Outcome::OutOfBudget;
            }
            let col = &self.columns[bj];
            let mut next_rows = Vec::with_capacity(j + 1);
            let mut ok = true;
            for r in &rows {
                let mut r = r.clone();
                r.intersect_with(col);
                if r.is_clear() {
                    ok = false;
                    break;
                }
                next_rows.push(r);
            }
            if !ok {
                continue;
            }
            let mut opened = rest.clone();
            opened.intersect_with(col);
            if opened.is_clear() {
                continue;
            }
            next_rows.push(opened);
            let mut next_rest = rest.clone();
            next_rest.difference_with(col);
            if j + 1 < self.k && next_rest.is_clear() {
                continue;
            }
            self.b.push(bj);
            match self.extend(next_rows, next_rest) {
                Outcome::Exhausted => {
                    self.b.pop();
                }
                other => return other,
            }
        }
        Outcome::Exhausted
    }
}

/// Searches for a k-order witness within `budget` search nodes.
pub fn is_k_stable(set: &GSet, k: usize, budget: u64) -> Result<StabilityStatus> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let g = set.group();
    if set.is_empty() {
        return Ok(StabilityStatus::Stable { nodes: 0 });
    }
    let columns: Vec<FixedBitSet> = g
        .elements()
        .map(|b| {
            let mut c = FixedBitSet::with_capacity(g.order());
            for a in g.elements() {
                if set.contains(g.op(a, b)) {
                    c.insert(a);
                }
            }
            c
        })
        .collect();
    let mut search = Search {
        group: g,
        k,
        columns,
        budget,
        nodes: 0,
        b: Vec::with_capacity(k),
    };
    let mut all = FixedBitSet::with_capacity(g.order());
    all.insert_range(..);
    match search.extend(Vec::new(), all) {
        Outcome::Found(rows) => {
            let a: Vec<Element> = rows.iter().map(|r| r.minimum().expect("non-empty row")).collect();
            let witness = StabilityWitness::new(set, a, search.b.clone());
            if !witness.verified {
                return Err(Error::InvalidArgument("order-property search produced an invalid witness".into()));
            }
            Ok(StabilityStatus::Unstable {
                witness,
                nodes: search.nodes,
            })
        }
        Outcome::Exhausted => Ok(StabilityStatus::Stable { nodes: search.nodes }),
        Outcome::OutOfBudget => Ok(StabilityStatus::Unknown { nodes: search.nodes }),
    }
}

pub fn find_order_witness(set: &GSet, k: usize, budget: u64) -> Result<Option<StabilityWitness>> {
    match is_k_stable(set, k, budget)? {
        StabilityStatus::Unstable { witness, .. } => Ok(Some(witness)),
        StabilityStatus::Stable { .. } => Ok(None),
        StabilityStatus::Unknown { nodes } => Err(Error::CapExceeded(format!(
            "order-property search stopped after {nodes} nodes"
        ))),
    }
}

/// `a_i = i − 1`, `b_j = k − j` for `[0, k)` inside `Z/4k`.
pub fn progression_witness(k: usize) -> Result<(GSet, StabilityWitness)> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let g = Group::cyclic(4 * k)?;
    let set = GSet::new(&g, 0..k)?;
    let a = (1..=k).map(|i| i - 1).collect();
    let b = (1..=k).map(|j| k - j).collect();
    let w = StabilityWitness::new(&set, a, b);
    Ok((set, w))
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityRelation {
    pub k_max: usize,
    /// Largest k ≤ k_max with a verified witness.
    pub largest_order: Option<usize>,
    /// Least k ≤ k_max at which the set is proven k-stable.
    pub stable_from: Option<usize>,
    /// First k at which the search ran out of budget.
    pub unknown_at: Option<usize>,
    pub vcd: usize,
    pub vcd_global: usize,
    /// `vcd(A) ≤ vcd(G, A) ≤ k − 1` at `k = stable_from`; `None` when no
    /// stability was proven.
    pub relation_holds: Option<bool>,
}

/// Finds where the order property stops (k-stability is inherited by larger
/// k) and compares with the VC-dimensions.
pub fn stability_vcd_relation(set: &GSet, k_max: usize, budget: u64) -> Result<StabilityRelation> {
    set.require_nonempty("stability relation needs a non-empty set")?;
    let mut largest_order = None;
    let mut stable_from = None;
    let mut unknown_at = None;
    for k in 1..=k_max {
        match is_k_stable(set, k, budget)? {
            StabilityStatus::Unstable { .. } => largest_order = Some(k),
            StabilityStatus::Stable { .. } => {
                stable_from = Some(k);
                break;
            }
            StabilityStatus::Unknown { .. } => {
                unknown_at = Some(k);
                break;
            }
        }
    }
    let vcd = vcd_self(set, DEFAULT_CAP)?.dimension;
    let vcd_g = vcd_global(set, DEFAULT_CAP)?.dimension;
    Ok(StabilityRelation {
        k_max,
        largest_order,
        stable_from,
        unknown_at,
        vcd,
        vcd_global: vcd_g,
        relation_holds: stable_from.map(|k| vcd <= vcd_g && vcd_g < k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Tries every pair of k-tuples.
    fn brute_has_order(set: &GSet, k: usize) -> bool {
        let n = set.group().order();
        let tuples: Vec<Vec<usize>> = (0..n.pow(k as u32))
            .map(|mut c| {
                (0..k)
                    .map(|_| {
                        let d = c % n;
                        c /= n;
                        d
                    })
                    .collect()
            })
            .collect();
        tuples.iter().any(|a| {
            tuples
                .iter()
                .any(|b| StabilityWitness::new(set, a.clone(), b.clone()).verified)
        })
    }

    #[test]
    fn progression_construction() {
        for k in 1..=8 {
            let (set, w) = progression_witness(k).unwrap();
            assert!(w.verified);
            assert!(find_order_witness(&set, k, DEFAULT_BUDGET).unwrap().is_some());
        }
    }

    #[test]
    fn subgroups_are_two_stable() {
        let z8 = Group::cyclic(8).unwrap();
        let h = GSet::new(&z8, [0, 2, 4, 6]).unwrap();
        assert_eq!(is_k_stable(&h, 2, DEFAULT_BUDGET).unwrap(), StabilityStatus::Stable { nodes: 8 });
        assert!(find_order_witness(&h, 1, DEFAULT_BUDGET).unwrap().is_some());
    }

    #[test]
    fn agrees_with_brute_force() {
        let z6 = Group::cyclic(6).unwrap();
        let s3 = Group::symmetric(3).unwrap();
        for g in [z6, s3] {
            for bits in 1u32..64 {
                let set = GSet::new(&g, (0..6).filter(|i| bits >> i & 1 == 1)).unwrap();
                for k in 1..=3 {
                    let found = find_order_witness(&set, k, DEFAULT_BUDGET).unwrap().is_some();
                    assert_eq!(found, brute_has_order(&set, k), "{:?} k={k}", set.to_vec());
                }
            }
        }
    }

    #[test]
    fn budget_gives_unknown() {
        let (set, _) = progression_witness(6).unwrap();
        assert!(matches!(is_k_stable(&set, 6, 3).unwrap(), StabilityStatus::Unknown { .. }));
    }

    #[test]
    fn relation_on_a_progression() {
        let z50 = Group::cyclic(50).unwrap();
        let ap = GSet::new(&z50, 0..10).unwrap();
        let r = stability_vcd_relation(&ap, 10, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.largest_order, Some(10));
        assert_eq!(r.vcd, 2);
        let coset = GSet::new(&z50, (0..50).filter(|x| x % 5 == 1)).unwrap();
        let r = stability_vcd_relation(&coset, 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.stable_from, Some(2));
        assert_eq!(r.relation_holds, Some(true));
    }
}
