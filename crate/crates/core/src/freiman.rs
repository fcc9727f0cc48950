//! Freiman isomorphisms, generalised arithmetic progressions and the
//! finite-field modelling lemma.
//!
//! Isomorphism checks group the relevant sums into fibres: a bijection
//! preserves (and reflects) every equation `a₁b₁⁻¹ = a₂b₂⁻¹` exactly when the
//! induced map between fibres of the quotient map is well defined and
//! injective. That costs one pass over the pairs (or s-multisets) instead of
//! one pass over all pairs of them.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::linalg::Matrix;
use crate::setcalc::{iterate_product, quotient_set, GSet};

/// Pair-check refuses `|A|·|B|` above this.
pub const PAIR_CAP: usize = 10_000;
/// s-isomorphism checks run exhaustively up to this many s-multisets.
pub const EXHAUSTIVE_MULTISETS: u128 = 5_000_000;
pub const DEFAULT_TRIALS: usize = 200_000;
pub const DEFAULT_MAX_ATTEMPTS: usize = 100;

/// A bijection between a subset of one group and a subset of another.
#[derive(Clone, Debug)]
pub struct FreimanMap {
    domain: GSet,
    codomain: GSet,
    /// `(x, φ(x))` in increasing order of `x`.
    pairs: Vec<(Element, Element)>,
}

impl FreimanMap {
    pub fn new(source: &Arc<Group>, target: &Arc<Group>, pairs: impl IntoIterator<Item = (Element, Element)>) -> Result<FreimanMap> {
        let mut pairs: Vec<(Element, Element)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        let domain = GSet::new(source, pairs.iter().map(|p| p.0))?;
        let codomain = GSet::new(target, pairs.iter().map(|p| p.1))?;
        if domain.len() != pairs.len() || codomain.len() != pairs.len() {
            return Err(Error::InvalidArgument("a Freiman map must be a bijection".into()));
        }
        Ok(FreimanMap {
            domain,
            codomain,
            pairs,
        })
    }

    pub fn from_fn(domain: &GSet, target: &Arc<Group>, f: impl Fn(Element) -> Element) -> Result<FreimanMap> {
        FreimanMap::new(domain.group(), target, domain.iter().map(|x| (x, f(x))))
    }

    pub fn domain(&self) -> &GSet {
        &self.domain
    }

    pub fn codomain(&self) -> &GSet {
        &self.codomain
    }

    pub fn pairs(&self) -> &[(Element, Element)] {
        &self.pairs
    }

    pub fn apply(&self, x: Element) -> Option<Element> {
        self.pairs
            .binary_search_by_key(&x, |p| p.0)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn image_of(&self, set: &GSet) -> Result<GSet> {
        let imgs = set
            .iter()
            .map(|x| {
                self.apply(x)
                    .ok_or_else(|| Error::InvalidArgument(format!("{x} is outside the domain")))
            })
            .collect::<Result<Vec<_>>>()?;
        GSet::new(self.codomain.group(), imgs)
    }
}

impl Serialize for FreimanMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.pairs.iter())
    }
}

/// Two equations that the map treats differently.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub left: Vec<Element>,
    pub right: Vec<Element>,
}

/// Whether `(φ_A, φ_B)` is a Freiman 2-isomorphism pair:
/// `a₁b₁⁻¹ = a₂b₂⁻¹ ⇔ φ_A(a₁)φ_B(b₁)⁻¹ = φ_A(a₂)φ_B(b₂)⁻¹`.
/// Returns a violating pair of pairs when there is one.
pub fn check_2_isomorphism_pair(phi_a: &FreimanMap, phi_b: &FreimanMap) -> Result<Option<Violation>> {
    phi_a.domain.same_group(&phi_b.domain)?;
    phi_a.codomain.same_group(&phi_b.codomain)?;
    let work = phi_a.pairs.len() * phi_b.pairs.len();
    if work > PAIR_CAP {
        return Err(Error::CapExceeded(format!(
            "2-isomorphism check needs |A|·|B| ≤ {PAIR_CAP}, got {work}"
        )));
    }
    let g = phi_a.domain.group();
    let h = phi_a.codomain.group();
    let mut forward: HashMap<Element, (Element, [Element; 2])> = HashMap::new();
    let mut backward: HashMap<Element, (Element, [Element; 2])> = HashMap::new();
    for &(a, fa) in &phi_a.pairs {
        for &(b, fb) in &phi_b.pairs {
            let q = g.div(a, b);
            let fq = h.div(fa, fb);
            if let Some(&(prev, w)) = forward.get(&q) {
                if prev != fq {
                    return Ok(Some(Violation {
                        left: w.to_vec(),
                        right: vec![a, b],
                    }));
                }
            } else {
                forward.insert(q, (fq, [a, b]));
            }
            if let Some(&(prev, w)) = backward.get(&fq) {
                if prev != q {
                    return Ok(Some(Violation {
                        left: w.to_vec(),
                        right: vec![a, b],
                    }));
                }
            } else {
                backward.insert(fq, (q, [a, b]));
            }
        }
    }
    Ok(None)
}

pub fn is_2_isomorphism_pair(phi_a: &FreimanMap, phi_b: &FreimanMap) -> Result<bool> {
    Ok(check_2_isomorphism_pair(phi_a, phi_b)?.is_none())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IsoStatus {
    /// Every s-multiset was examined.
    Verified { multisets: u64 },
    /// Random sampling found nothing; not a proof.
    NoViolationFound { trials: u64 },
    Violation(Violation),
}

impl IsoStatus {
    pub fn holds(&self) -> Option<bool> {
        match self {
            IsoStatus::Verified { .. } => Some(true),
            IsoStatus::NoViolationFound { .. } => None,
            IsoStatus::Violation(_) => Some(false),
        }
    }
}

fn multiset_count(n: usize, s: usize) -> u128 {
    // C(n + s − 1, s)
    let mut c: u128 = 1;
    for i in 0..s as u128 {
        c = c.saturating_mul(n as u128 + i) / (i + 1);
    }
    c
}

/// Tracks sums of multisets on both sides and reports the first
/// inconsistency.
struct FiberCheck<'a> {
    g: &'a Group,
    h: &'a Group,
    forward: HashMap<Element, (Element, Vec<Element>)>,
    backward: HashMap<Element, (Element, Vec<Element>)>,
}

impl FiberCheck<'_> {
    fn add(&mut self, multiset: &[(Element, Element)]) -> Option<Violation> {
        let sum = multiset.iter().fold(self.g.identity(), |acc, p| self.g.op(acc, p.0));
        let image = multiset.iter().fold(self.h.identity(), |acc, p| self.h.op(acc, p.1));
        let elems: Vec<Element> = multiset.iter().map(|p| p.0).collect();
        for (map, key, val) in [(&mut self.forward, sum, image), (&mut self.backward, image, sum)] {
            match map.get(&key) {
                Some((prev, w)) if *prev != val => {
                    return Some(Violation {
                        left: w.clone(),
                        right: elems,
                    })
                }
                Some(_) => {}
                None => {
                    map.insert(key, (val, elems.clone()));
                }
            }
        }
        None
    }
}

/// Checks `a₁+⋯+a_s = a_{s+1}+⋯+a_{2s} ⇔ φ(a₁)+⋯+φ(a_s) = φ(a_{s+1})+⋯+φ(a_{2s})`.
/// Exhaustive over s-multisets when there are at most
/// [`EXHAUSTIVE_MULTISETS`], otherwise `trials` random multisets.
pub fn is_s_isomorphism(phi: &FreimanMap, s: usize, seed: u64, trials: usize) -> Result<IsoStatus> {
    let g = phi.domain.group();
    let h = phi.codomain.group();
    if !g.is_abelian() || !h.is_abelian() {
        return Err(Error::Unsupported("s-isomorphisms are defined for abelian groups".into()));
    }
    if s == 0 {
        return Err(Error::InvalidArgument("s must be at least 1".into()));
    }
    let pairs = &phi.pairs;
    let mut check = FiberCheck {
        g,
        h,
        forward: HashMap::new(),
        backward: HashMap::new(),
    };
    let total = multiset_count(pairs.len(), s);
    if total <= EXHAUSTIVE_MULTISETS {
        // Non-decreasing index sequences enumerate the multisets.
        let mut idx = vec![0usize; s];
        let mut buf = Vec::with_capacity(s);
        loop {
            buf.clear();
            buf.extend(idx.iter().map(|&i| pairs[i]));
            if let Some(v) = check.add(&buf) {
                return Ok(IsoStatus::Violation(v));
            }
            let Some(pos) = (0..s).rev().find(|&i| idx[i] + 1 < pairs.len()) else {
                break;
            };
            let next = idx[pos] + 1;
            for v in &mut idx[pos..] {
                *v = next;
            }
        }
        return Ok(IsoStatus::Verified {
            multisets: total as u64,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = Vec::with_capacity(s);
    for _ in 0..trials {
        buf.clear();
        let mut picks: Vec<usize> = (0..s).map(|_| rng.random_range(0..pairs.len())).collect();
        picks.sort_unstable();
        buf.extend(picks.iter().map(|&i| pairs[i]));
        if let Some(v) = check.add(&buf) {
            return Ok(IsoStatus::Violation(v));
        }
    }
    Ok(IsoStatus::NoViolationFound { trials: trials as u64 })
}

/// `sA − sA` in an abelian group.
pub fn iterated_difference(a: &GSet, s: usize) -> Result<GSet> {
    let sa = iterate_product(a, s)?;
    quotient_set(&sa, &sa)
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelEmbedding {
    pub s: usize,
    pub p: usize,
    pub m: usize,
    /// `|sA − sA|`.
    pub difference_size: usize,
    /// `p^m < p·|sA − sA|`.
    pub bound_holds: bool,
    pub attempts: usize,
    pub matrix: Matrix,
    #[serde(skip)]
    pub target: Arc<Group>,
    pub map: FreimanMap,
    pub verification: IsoStatus,
}

/// Embeds `A ⊂ F_p^n` into `F_p^m` by a random linear map whose kernel meets
/// `sA − sA` only in 0; such a map is a Freiman s-isomorphism on `A`. `m` is
/// the least value with `p^m ≥ |sA − sA|`.
pub fn model_embed(a: &GSet, s: usize, seed: u64, max_attempts: usize) -> Result<ModelEmbedding> {
    let g = a.group();
    let (p, n) = g.require_vector_space()?;
    a.require_nonempty("modelling needs a non-empty set")?;
    if s == 0 {
        return Err(Error::InvalidArgument("s must be at least 1".into()));
    }
    let diff = iterated_difference(a, s)?;
    let mut m = 0usize;
    let mut pm: u128 = 1;
    while pm < diff.len() as u128 {
        m += 1;
        pm *= p as u128;
    }
    let m = m.min(n as usize);
    let target = Group::vector_space(p, m as u32)?;
    let nonzero: Vec<Vec<u64>> = diff
        .iter()
        .filter(|&x| x != g.identity())
        .map(|x| g.coords(x).map(|c| c.into_iter().map(|v| v as u64).collect()))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    let matrix = loop {
        if attempts == max_attempts {
            return Err(Error::Modelling(format!(
                "no admissible codimension-{m} subspace in {max_attempts} attempts (|sA−sA| = {})",
                diff.len()
            )));
        }
        attempts += 1;
        let candidate = Matrix::random(p as u64, m, n as usize, &mut rng);
        if candidate.rank() < m {
            continue;
        }
        if nonzero.iter().all(|v| candidate.apply(v).iter().any(|&c| c != 0)) {
            break candidate;
        }
    };
    let project = |x: Element| -> Result<Element> {
        let c: Vec<u64> = g.coords(x)?.into_iter().map(|v| v as u64).collect();
        target.from_coords(&matrix.apply(&c).into_iter().map(|v| v as usize).collect::<Vec<_>>())
    };
    let pairs = a.iter().map(|x| Ok((x, project(x)?))).collect::<Result<Vec<_>>>()?;
    let map = FreimanMap::new(g, &target, pairs)?;
    let verification = is_s_isomorphism(&map, s, seed, DEFAULT_TRIALS)?;
    Ok(ModelEmbedding {
        s,
        p,
        m,
        difference_size: diff.len(),
        bound_holds: pm < (p as u128) * diff.len() as u128,
        attempts,
        matrix,
        target,
        map,
        verification,
    })
}

impl ModelEmbedding {
    /// The linear extension of the map to the whole source group.
    pub fn project(&self, source: &Group, x: Element) -> Result<Element> {
        let c: Vec<u64> = source.coords(x)?.into_iter().map(|v| v as u64).collect();
        self.target
            .from_coords(&self.matrix.apply(&c).into_iter().map(|v| v as usize).collect::<Vec<_>>())
    }
}

/// `a + {Σ λ_i x_i : 0 ≤ λ_i < N_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct GapSpec {
    pub base: Element,
    pub generators: Vec<Element>,
    pub lengths: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapRealization {
    pub set: GSet,
    /// `|A| = N_1 ⋯ N_d`.
    pub proper: bool,
    /// Properness of `A − A` as the progression with lengths `2N_i − 1`.
    pub difference_proper: Option<bool>,
}

fn progression_sums(group: &Group, base: Element, gens: &[Element], lengths: &[usize], offsets: &[i64]) -> Vec<Element> {
    // offsets[i] shifts λ_i, so λ_i runs over offsets[i] .. offsets[i] + lengths[i].
    let mut sums = vec![base];
    for ((&x, &len), &off) in gens.iter().zip(lengths).zip(offsets) {
        let start = if off >= 0 {
            group.pow(x, off as usize)
        } else {
            group.inv(group.pow(x, (-off) as usize))
        };
        let mut next = Vec::with_capacity(sums.len() * len);
        for &s in &sums {
            let mut cur = group.op(s, start);
            for _ in 0..len {
                next.push(cur);
                cur = group.op(cur, x);
            }
        }
        sums = next;
    }
    sums
}

pub fn gap_realize(spec: &GapSpec, group: &Arc<Group>, check_difference: bool) -> Result<GapRealization> {
    if !group.is_abelian() {
        return Err(Error::Unsupported("progressions are built in abelian groups".into()));
    }
    if spec.generators.len() != spec.lengths.len() || spec.lengths.contains(&0) {
        return Err(Error::InvalidArgument("one positive length per generator".into()));
    }
    group.check(spec.base)?;
    for &x in &spec.generators {
        group.check(x)?;
    }
    let d = spec.generators.len();
    let sums = progression_sums(group, spec.base, &spec.generators, &spec.lengths, &vec![0; d]);
    let set = GSet::new(group, sums.iter().copied())?;
    let proper = set.len() == sums.len();
    let difference_proper = check_difference.then(|| {
        let lengths: Vec<usize> = spec.lengths.iter().map(|&n| 2 * n - 1).collect();
        let offsets: Vec<i64> = spec.lengths.iter().map(|&n| -(n as i64 - 1)).collect();
        let diffs = progression_sums(group, group.identity(), &spec.generators, &lengths, &offsets);
        GSet::new(group, diffs.iter().copied()).map(|s| s.len() == diffs.len()).unwrap_or(false)
    });
    Ok(GapRealization {
        set,
        proper,
        difference_proper,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegerEmbedding {
    pub modulus: usize,
    pub set: GSet,
    /// The differences of the integers stay distinct mod the modulus, so
    /// reduction is a Freiman 2-isomorphism onto its image.
    pub wraparound_safe: bool,
}

/// Reduces a finite set of integers into `Z/M`.
pub fn embed_integers(values: &[i64], modulus: usize) -> Result<IntegerEmbedding> {
    if values.is_empty() {
        return Err(Error::EmptySet("integer set"));
    }
    let group = Group::cyclic(modulus)?;
    let m = modulus as i64;
    let set = GSet::new(&group, values.iter().map(|v| v.rem_euclid(m) as usize))?;
    let mut diffs = std::collections::HashSet::new();
    let mut reduced = std::collections::HashSet::new();
    for &x in values {
        for &y in values {
            if diffs.insert(x - y) {
                reduced.insert((x - y).rem_euclid(m));
            }
        }
    }
    Ok(IntegerEmbedding {
        modulus,
        wraparound_safe: set.len() == values.len() && diffs.len() == reduced.len(),
        set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Quadruple check straight from the definition.
    fn brute_pair(phi_a: &FreimanMap, phi_b: &FreimanMap) -> bool {
        let g = phi_a.domain().group();
        let h = phi_a.codomain().group();
        for &(a1, fa1) in phi_a.pairs() {
            for &(b1, fb1) in phi_b.pairs() {
                for &(a2, fa2) in phi_a.pairs() {
                    for &(b2, fb2) in phi_b.pairs() {
                        let lhs = g.div(a1, b1) == g.div(a2, b2);
                        let rhs = h.div(fa1, fb1) == h.div(fa2, fb2);
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn translations_and_embeddings() {
        let z7 = Group::cyclic(7).unwrap();
        let z100 = Group::cyclic(100).unwrap();
        let a = GSet::new(&z7, 0..4).unwrap();
        let shift = FreimanMap::from_fn(&a, &z7, |x| (x + 3) % 7).unwrap();
        let id = FreimanMap::from_fn(&a, &z7, |x| x).unwrap();
        assert!(is_2_isomorphism_pair(&shift, &shift).unwrap());
        assert!(is_2_isomorphism_pair(&shift, &id).unwrap());
        // Differences −3..3 are distinct mod 7, so lifting to Z/100 is safe.
        let lift = FreimanMap::from_fn(&a, &z100, |x| x).unwrap();
        assert_eq!(is_2_isomorphism_pair(&lift, &lift).unwrap(), brute_pair(&lift, &lift));
        assert!(is_2_isomorphism_pair(&lift, &lift).unwrap());
    }

    #[test]
    fn inversion_in_a_nonabelian_group() {
        let s3 = Group::symmetric(3).unwrap();
        let mut found = false;
        for bits in 1u32..64 {
            let a = GSet::new(&s3, (0..6).filter(|i| bits >> i & 1 == 1)).unwrap();
            let inv = FreimanMap::from_fn(&a, &s3, |x| s3.inv(x)).unwrap();
            let fast = is_2_isomorphism_pair(&inv, &inv).unwrap();
            assert_eq!(fast, brute_pair(&inv, &inv));
            found |= !fast;
        }
        assert!(found);
    }

    #[test]
    fn s_isomorphisms() {
        let z5 = Group::cyclic(5).unwrap();
        let z10 = Group::cyclic(10).unwrap();
        let a = GSet::new(&z5, [0, 1, 2]).unwrap();
        let id = FreimanMap::from_fn(&a, &z5, |x| x).unwrap();
        assert_eq!(is_s_isomorphism(&id, 3, 0, 10).unwrap().holds(), Some(true));
        // x ↦ 2x is an injective homomorphism Z/5 → Z/10.
        let double = FreimanMap::from_fn(&a, &z10, |x| 2 * x).unwrap();
        assert_eq!(is_s_isomorphism(&double, 2, 0, 10).unwrap().holds(), Some(true));
        assert_eq!(is_s_isomorphism(&double, 3, 0, 10).unwrap().holds(), Some(true));
        // Lifting to Z/100: 1+1 = 0+2 holds on both sides, but
        // 2+2+2 ≡ 0+0+1 in Z/5 while 6 ≠ 1 in Z/100.
        let z100 = Group::cyclic(100).unwrap();
        let lift = FreimanMap::from_fn(&a, &z100, |x| x).unwrap();
        assert_eq!(is_s_isomorphism(&lift, 2, 0, 10).unwrap().holds(), Some(true));
        assert_eq!(is_s_isomorphism(&lift, 3, 0, 10).unwrap().holds(), Some(false));
    }

    #[test]
    fn modelling() {
        let g = Group::vector_space(2, 10).unwrap();
        let a = GSet::new(&g, [0, 1, 2, 3, 64, 65, 66, 67]).unwrap();
        let e = model_embed(&a, 2, 5, DEFAULT_MAX_ATTEMPTS).unwrap();
        assert!(e.bound_holds);
        assert_eq!(e.verification.holds(), Some(true));
        assert_eq!(e.map.codomain().len(), a.len());
        let single = GSet::new(&g, [0]).unwrap();
        let e = model_embed(&single, 4, 1, DEFAULT_MAX_ATTEMPTS).unwrap();
        assert_eq!(e.m, 0);
        assert_eq!(e.target.order(), 1);
    }

    #[test]
    fn progressions() {
        let z100 = Group::cyclic(100).unwrap();
        let r = gap_realize(&GapSpec { base: 7, generators: vec![1], lengths: vec![5] }, &z100, true).unwrap();
        assert_eq!(r.set.to_vec(), vec![7, 8, 9, 10, 11]);
        assert!(r.proper && r.difference_proper == Some(true));
        let r = gap_realize(&GapSpec { base: 0, generators: vec![1, 10], lengths: vec![3, 3] }, &z100, true).unwrap();
        assert_eq!(r.set.len(), 9);
        assert!(r.proper);
        let r = gap_realize(&GapSpec { base: 0, generators: vec![1, 2], lengths: vec![3, 3] }, &z100, false).unwrap();
        assert!(!r.proper);
    }

    #[test]
    fn integer_embeddings() {
        let e = embed_integers(&[0, 3, 7, 20], 100).unwrap();
        assert!(e.wraparound_safe);
        let e = embed_integers(&[0, 3, 7, 20], 30).unwrap();
        assert!(!e.wraparound_safe);
    }
}
