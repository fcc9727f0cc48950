//! Exact group VC-dimensions.
//!
//! `vcd(A,B)` is the VC-dimension of `{A ∩ xB : x ∈ A·B⁻¹}` on the ground set
//! `A`. The search works level by level: a set can only be shattered if all
//! of its subsets are, so shattered `k`-sets are grown from shattered
//! `(k−1)`-sets.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Element;
use crate::setcalc::{product_set, GSet};

pub const DEFAULT_CAP: usize = 10;

/// Shattering checks refuse sets larger than this.
pub const MAX_SHATTER_SIZE: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// `{A ∩ xB : x ∈ A·B⁻¹}`.
    Restricted,
    /// `{A ∩ xB : x ∈ G}`.
    Global,
    /// `{A ∩ Bx : x ∈ B⁻¹·A}`.
    Right,
}

impl std::str::FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Scope> {
        match s {
            "restricted" => Ok(Scope::Restricted),
            "global" => Ok(Scope::Global),
            "right" => Ok(Scope::Right),
            other => Err(Error::InvalidArgument(format!("unknown scope `{other}`"))),
        }
    }
}

/// A deduplicated family of subsets of a ground set.
#[derive(Clone, Debug)]
pub struct SetFamily {
    ground: GSet,
    members: Vec<FixedBitSet>,
}

impl SetFamily {
    pub fn new(ground: GSet, members: impl IntoIterator<Item = GSet>) -> Result<SetFamily> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for m in members {
            m.same_group(&ground)?;
            if !m.is_subset(&ground) {
                return Err(Error::InvalidArgument(
                    "family member is not contained in the ground set".into(),
                ));
            }
            if seen.insert(m.bits().clone()) {
                out.push(m.bits().clone());
            }
        }
        Ok(SetFamily {
            ground,
            members: out,
        })
    }

    pub fn ground(&self) -> &GSet {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> Vec<GSet> {
        self.members
            .iter()
            .map(|b| GSet::from_bits(self.ground.group(), b.clone()))
            .collect()
    }

    pub fn contains_member(&self, set: &GSet) -> bool {
        self.members.iter().any(|b| b == set.bits())
    }
}

pub fn translate_family(a: &GSet, b: &GSet, scope: Scope) -> Result<SetFamily> {
    a.same_group(b)?;
    a.require_nonempty("VC-dimension needs a non-empty A")?;
    b.require_nonempty("VC-dimension needs a non-empty B")?;
    let g = a.group();
    let elems = a.to_vec();
    // `A ∩ xB = {y ∈ A : x⁻¹y ∈ B}` and `A ∩ Bx = {y ∈ A : yx⁻¹ ∈ B}`,
    // built by membership tests so small sets in large groups stay cheap.
    let trace = |x: Element, left: bool| {
        let xi = g.inv(x);
        let mut bits = FixedBitSet::with_capacity(g.order());
        for &y in &elems {
            let z = if left { g.op(xi, y) } else { g.op(y, xi) };
            if b.contains(z) {
                bits.insert(y);
            }
        }
        GSet::from_bits(g, bits)
    };
    let members: Vec<GSet> = match scope {
        Scope::Restricted => product_set(a, &b.inverse())?.iter().map(|x| trace(x, true)).collect(),
        Scope::Global => g.elements().map(|x| trace(x, true)).collect(),
        Scope::Right => product_set(&b.inverse(), a)?.iter().map(|x| trace(x, false)).collect(),
    };
    SetFamily::new(a.clone(), members)
}

/// `{xA : x ∈ G}` on the ground set `G`, whose dimension is `vcd(G, A)`.
pub fn group_translate_family(a: &GSet) -> Result<SetFamily> {
    a.require_nonempty("VC-dimension needs a non-empty A")?;
    let g = a.group();
    let members = g
        .elements()
        .map(|x| a.left_translate(x))
        .collect::<Result<Vec<_>>>()?;
    SetFamily::new(GSet::full(g), members)
}

/// Whether every subset of `x` is a trace `x ∩ F` of some member `F`.
pub fn shatters(family: &SetFamily, x: &GSet) -> Result<bool> {
    if x.len() > MAX_SHATTER_SIZE {
        return Err(Error::CapExceeded(format!(
            "shattering check on {} elements exceeds {MAX_SHATTER_SIZE}",
            x.len()
        )));
    }
    if !x.is_subset(&family.ground) {
        return Err(Error::InvalidArgument("set is not inside the ground set".into()));
    }
    let elems = x.to_vec();
    let mut traces = HashSet::new();
    for m in &family.members {
        let mask = elems
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &e)| acc | ((m.contains(e) as u32) << i));
        traces.insert(mask);
    }
    Ok(traces.len() == 1usize << elems.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VcResult {
    pub dimension: usize,
    /// The search stopped at the cap; the true dimension is at least `dimension`.
    pub at_cap: bool,
    pub witness: Vec<Element>,
    pub cap: usize,
}

/// Column view of a family: for each candidate ground element, the set of
/// members containing it.
struct Columns {
    elements: Vec<Element>,
    columns: Vec<FixedBitSet>,
    members: usize,
}

impl Columns {
    fn build(family: &SetFamily) -> Columns {
        let members = family.members.len();
        let mut seen = HashSet::new();
        let mut elements = Vec::new();
        let mut columns = Vec::new();
        for e in family.ground.iter() {
            let mut col = FixedBitSet::with_capacity(members);
            for (i, m) in family.members.iter().enumerate() {
                if m.contains(e) {
                    col.insert(i);
                }
            }
            let ones = col.count_ones(..);
            // Constant columns cannot realize both traces on a singleton, and
            // equal columns cannot both appear in a shattered set.
            if ones == 0 || ones == members {
                continue;
            }
            if seen.insert(col.clone()) {
                elements.push(e);
                columns.push(col);
            }
        }
        Columns {
            elements,
            columns,
            members,
        }
    }

    /// Splits every trace class by column `p`; both halves must keep at
    /// least `min` members.
    fn split(&self, classes: &[FixedBitSet], p: u32, min: usize) -> Option<Vec<FixedBitSet>> {
        let col = &self.columns[p as usize];
        let mut out = Vec::with_capacity(2 * classes.len());
        for c in classes {
            let mut inside = c.clone();
            inside.intersect_with(col);
            let n_in = inside.count_ones(..);
            if n_in < min || c.count_ones(..) - n_in < min {
                return None;
            }
            let mut outside = c.clone();
            outside.difference_with(col);
            out.push(inside);
            out.push(outside);
        }
        Some(out)
    }
}

/// Depth-first search over shattered sets in increasing position order. The
/// members realizing each trace on the current set form a class; adding an
/// element splits every class, and reaching size `t` from size `s` needs
/// every class to hold at least `2^(t−s)` members.
struct Dfs<'a> {
    cols: &'a Columns,
    /// Size the search is currently trying to reach.
    goal: &'a dyn Fn() -> usize,
    /// Called on every shattered set larger than the previous goal; returns
    /// whether to stop.
    found: &'a dyn Fn(&[u32]) -> bool,
}

impl Dfs<'_> {
    fn min_class(&self, size: usize) -> usize {
        1usize << (self.goal)().saturating_sub(size).min(63)
    }

    fn extend(&self, classes: &[FixedBitSet], chosen: &mut Vec<u32>, cands: &[u32]) -> bool {
        for (i, &p) in cands.iter().enumerate() {
            if chosen.len() + cands.len() - i < (self.goal)() {
                return false;
            }
            if self.step(classes, chosen, p, &cands[i + 1..]) {
                return true;
            }
        }
        false
    }

    /// Tries `chosen ∪ {p}` followed by elements of `later`.
    fn step(&self, classes: &[FixedBitSet], chosen: &mut Vec<u32>, p: u32, later: &[u32]) -> bool {
        let Some(next) = self.cols.split(classes, p, self.min_class(chosen.len() + 1)) else {
            return false;
        };
        chosen.push(p);
        if chosen.len() >= (self.goal)() && (self.found)(chosen) {
            return true;
        }
        let min = self.min_class(chosen.len() + 1);
        let rest: Vec<u32> = later
            .iter()
            .copied()
            .filter(|&q| self.cols.split(&next, q, min).is_some())
            .collect();
        if chosen.len() + rest.len() >= (self.goal)() && self.extend(&next, chosen, &rest) {
            return true;
        }
        chosen.pop();
        false
    }
}

pub fn vc_dimension(family: &SetFamily, cap: usize) -> Result<VcResult> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("VC-dimension of an empty family".into()));
    }
    if cap == 0 {
        return Ok(VcResult {
            dimension: 0,
            at_cap: true,
            witness: Vec::new(),
            cap,
        });
    }
    let cols = Columns::build(family);
    let n = cols.elements.len() as u32;
    if n == 0 {
        return Ok(VcResult {
            dimension: 0,
            at_cap: false,
            witness: Vec::new(),
            cap,
        });
    }
    // Every remaining singleton is shattered; the family size caps the rest.
    let limit = cap.min(usize::BITS as usize - 1 - cols.members.leading_zeros() as usize).max(1);
    let mut all = FixedBitSet::with_capacity(cols.members);
    all.insert_range(..);
    let root = vec![all];
    let best = AtomicUsize::new(1);
    let goal = || best.load(Ordering::Relaxed) + 1;
    let found = |set: &[u32]| best.fetch_max(set.len(), Ordering::Relaxed).max(set.len()) >= limit;
    (0..n).into_par_iter().for_each(|p| {
        if best.load(Ordering::Relaxed) >= limit {
            return;
        }
        let dfs = Dfs {
            cols: &cols,
            goal: &goal,
            found: &found,
        };
        let later: Vec<u32> = (p + 1..n).collect();
        dfs.step(&root, &mut Vec::new(), p, &later);
    });
    let dimension = best.into_inner();
    // The lexicographically first shattered set of that size, found
    // sequentially so the witness does not depend on scheduling.
    let witness = std::cell::RefCell::new(Vec::new());
    let target = || dimension;
    let record = |set: &[u32]| {
        *witness.borrow_mut() = set.to_vec();
        true
    };
    let dfs = Dfs {
        cols: &cols,
        goal: &target,
        found: &record,
    };
    let all: Vec<u32> = (0..n).collect();
    if dimension == 1 {
        *witness.borrow_mut() = vec![0];
    } else {
        dfs.extend(&root, &mut Vec::new(), &all);
    }
    let witness = witness.into_inner().iter().map(|&p| cols.elements[p as usize]).collect();
    Ok(VcResult {
        dimension,
        at_cap: dimension >= cap,
        witness,
        cap,
    })
}

pub fn vcd(a: &GSet, b: &GSet, cap: usize) -> Result<VcResult> {
    vc_dimension(&translate_family(a, b, Scope::Restricted)?, cap)
}

pub fn vcd_self(a: &GSet, cap: usize) -> Result<VcResult> {
    vcd(a, a, cap)
}

/// Cap for [`d_hint`]. Certifying the dimension of a random dense set means
/// ruling out every larger shattered set, which is the expensive part; a
/// hint only scales sample sizes, so stopping early is harmless.
pub const HINT_CAP: usize = 6;

/// `min(vcd(A), HINT_CAP)`, at least 1: the default dimension hint for
/// samplers.
pub fn d_hint(a: &GSet) -> Result<usize> {
    Ok(vcd_self(a, HINT_CAP)?.dimension.max(1))
}

/// `vcd(G, A)`: the dimension of all translates `xA`.
pub fn vcd_global(a: &GSet, cap: usize) -> Result<VcResult> {
    vc_dimension(&group_translate_family(a)?, cap)
}

pub fn vcdr(a: &GSet, b: &GSet, cap: usize) -> Result<VcResult> {
    vc_dimension(&translate_family(a, b, Scope::Right)?, cap)
}

pub fn vcd_scoped(a: &GSet, b: &GSet, scope: Scope, cap: usize) -> Result<VcResult> {
    vc_dimension(&translate_family(a, b, scope)?, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use std::sync::Arc;

    fn set(g: &Arc<Group>, xs: &[usize]) -> GSet {
        GSet::new(g, xs.iter().copied()).unwrap()
    }

    /// Largest shattered subset found by trying every subset of the ground set.
    fn brute_force(family: &SetFamily) -> usize {
        let ground = family.ground().to_vec();
        let mut best = 0;
        for mask in 0u64..1 << ground.len() {
            let size = mask.count_ones() as usize;
            if size <= best {
                continue;
            }
            let x = GSet::new(
                family.ground().group(),
                ground.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e),
            )
            .unwrap();
            if shatters(family, &x).unwrap() {
                best = size;
            }
        }
        best
    }

    #[test]
    fn subgroup_family_is_a_single_set() {
        let z6 = Group::cyclic(6).unwrap();
        let h = set(&z6, &[0, 3]);
        let fam = translate_family(&h, &h, Scope::Restricted).unwrap();
        assert_eq!(fam.len(), 1);
        assert!(fam.contains_member(&h));
        assert_eq!(vc_dimension(&fam, DEFAULT_CAP).unwrap().dimension, 0);
    }

    #[test]
    fn short_interval_family() {
        let z100 = Group::cyclic(100).unwrap();
        let a = set(&z100, &[0, 1, 2]);
        let fam = translate_family(&a, &a, Scope::Restricted).unwrap();
        let mut expected: Vec<GSet> = vec![
            set(&z100, &[0]),
            set(&z100, &[0, 1]),
            set(&z100, &[0, 1, 2]),
            set(&z100, &[1, 2]),
            set(&z100, &[2]),
        ];
        let mut got = fam.members();
        expected.sort_by_key(|s| s.to_vec());
        got.sort_by_key(|s| s.to_vec());
        assert_eq!(got, expected);
        // Global family differs at most by the empty set.
        let global = translate_family(&a, &a, Scope::Global).unwrap();
        assert_eq!(global.len(), fam.len() + 1);
        assert!(global.contains_member(&GSet::empty(&z100)));
    }

    #[test]
    fn shattering_edge_cases() {
        let z10 = Group::cyclic(10).unwrap();
        let a = set(&z10, &[0, 1, 2]);
        let single = SetFamily::new(a.clone(), [a.clone()]).unwrap();
        assert!(shatters(&single, &GSet::empty(&z10)).unwrap());
        assert!(!shatters(&single, &set(&z10, &[1])).unwrap());
        // Intervals never separate the middle point from the ends.
        let fam = translate_family(&a, &a, Scope::Restricted).unwrap();
        assert!(!shatters(&fam, &set(&z10, &[0, 2])).unwrap());
        assert!(shatters(&fam, &set(&z10, &[0, 1])).unwrap());
        let big = Group::cyclic(64).unwrap();
        let huge = GSet::full(&big);
        let fam = SetFamily::new(huge.clone(), [huge.clone()]).unwrap();
        assert!(matches!(shatters(&fam, &huge), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn arithmetic_progressions() {
        let z100 = Group::cyclic(100).unwrap();
        let ap = set(&z100, &[0, 1, 2, 3]);
        let r = vcd_self(&ap, DEFAULT_CAP).unwrap();
        assert_eq!(r.dimension, 2);
        assert!(!r.at_cap);
        assert_eq!(r.witness, vec![0, 1]);
        let z10 = Group::cyclic(10).unwrap();
        assert_eq!(vcd_self(&set(&z10, &[0, 1]), DEFAULT_CAP).unwrap().dimension, 1);
    }

    #[test]
    fn cosets_have_dimension_zero() {
        let z6 = Group::cyclic(6).unwrap();
        assert_eq!(vcd_self(&set(&z6, &[1, 3, 5]), DEFAULT_CAP).unwrap().dimension, 0);
        // vcd(G, A) is one larger for a proper coset.
        assert_eq!(vcd_global(&set(&z6, &[1, 3, 5]), DEFAULT_CAP).unwrap().dimension, 1);
    }

    #[test]
    fn boxes_stay_below_twice_the_rank() {
        let g = Group::product(&[10, 10]).unwrap();
        let bx: Vec<usize> = (0..3).flat_map(|i| (0..3).map(move |j| i + 10 * j)).collect();
        let a = set(&g, &bx);
        assert!(vcd_self(&a, DEFAULT_CAP).unwrap().dimension <= 4);
    }

    #[test]
    fn random_instance_matches_brute_force() {
        use rand::{seq::index::sample, SeedableRng};
        let z13 = Group::cyclic(13).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..40 {
            let a = GSet::new(&z13, sample(&mut rng, 13, 6)).unwrap();
            let fam = translate_family(&a, &a, Scope::Restricted).unwrap();
            assert_eq!(vc_dimension(&fam, DEFAULT_CAP).unwrap().dimension, brute_force(&fam));
        }
    }

    #[test]
    fn cap_is_reported() {
        let z13 = Group::cyclic(13).unwrap();
        let a = set(&z13, &[0, 1, 3, 9]);
        let full = vcd_self(&a, DEFAULT_CAP).unwrap();
        assert!(full.dimension >= 1);
        let capped = vcd_self(&a, 1).unwrap();
        assert_eq!(capped.dimension, 1);
        assert!(capped.at_cap);
    }

    #[test]
    fn right_dimension_matches_inverse() {
        let s3 = Group::symmetric(3).unwrap();
        for bits in 1u32..64 {
            let a = GSet::new(&s3, (0..6).filter(|i| bits >> i & 1 == 1)).unwrap();
            let left = vcd_self(&a.inverse(), DEFAULT_CAP).unwrap().dimension;
            let right = vcdr(&a, &a, DEFAULT_CAP).unwrap().dimension;
            assert_eq!(left, right);
        }
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let z5 = Group::cyclic(5).unwrap();
        assert!(matches!(
            vcd_self(&GSet::empty(&z5), DEFAULT_CAP),
            Err(Error::EmptySet(_))
        ));
    }
}
