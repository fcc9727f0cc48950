//! Subsets of a group, product sets, and exact integer convolutions.
//!
//! Translations follow the left convention `τ_t f(x) = f(t·x)`, and the skew
//! convolution `1_A ∘ 1_B(x)` counts `|A ∩ xB|`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::rational::Rational;
use crate::registry::{Named, Registry};

/// A subset of a finite group, stored as a membership bit-vector.
#[derive(Clone)]
pub struct GSet {
    group: Arc<Group>,
    bits: FixedBitSet,
    len: usize,
}

impl GSet {
    pub fn new(group: &Arc<Group>, elements: impl IntoIterator<Item = Element>) -> Result<GSet> {
        let mut bits = FixedBitSet::with_capacity(group.order());
        for x in elements {
            group.check(x)?;
            bits.insert(x);
        }
        Ok(Self::from_bits(group, bits))
    }

    pub fn from_bits(group: &Arc<Group>, bits: FixedBitSet) -> GSet {
        debug_assert_eq!(bits.len(), group.order());
        let len = bits.count_ones(..);
        GSet {
            group: Arc::clone(group),
            bits,
            len,
        }
    }

    pub fn from_predicate(group: &Arc<Group>, pred: impl Fn(Element) -> bool) -> GSet {
        let mut bits = FixedBitSet::with_capacity(group.order());
        for x in group.elements() {
            if pred(x) {
                bits.insert(x);
            }
        }
        Self::from_bits(group, bits)
    }

    pub fn empty(group: &Arc<Group>) -> GSet {
        Self::from_bits(group, FixedBitSet::with_capacity(group.order()))
    }

    pub fn full(group: &Arc<Group>) -> GSet {
        let mut bits = FixedBitSet::with_capacity(group.order());
        bits.insert_range(..);
        Self::from_bits(group, bits)
    }

    pub fn singleton(group: &Arc<Group>, x: Element) -> Result<GSet> {
        Self::new(group, [x])
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    #[inline]
    pub fn contains(&self, x: Element) -> bool {
        self.bits.contains(x)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<Element> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<Element> {
        self.iter().next()
    }

    pub fn same_group(&self, other: &GSet) -> Result<()> {
        self.group.same_group(&other.group)
    }

    pub fn require_nonempty(&self, what: &'static str) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptySet(what))
        } else {
            Ok(())
        }
    }

    fn combine(&self, other: &GSet, f: impl Fn(&mut FixedBitSet, &FixedBitSet)) -> Result<GSet> {
        self.same_group(other)?;
        let mut bits = self.bits.clone();
        f(&mut bits, &other.bits);
        Ok(Self::from_bits(&self.group, bits))
    }

    pub fn union(&self, other: &GSet) -> Result<GSet> {
        self.combine(other, |a, b| a.union_with(b))
    }

    pub fn intersection(&self, other: &GSet) -> Result<GSet> {
        self.combine(other, |a, b| a.intersect_with(b))
    }

    pub fn difference(&self, other: &GSet) -> Result<GSet> {
        self.combine(other, |a, b| a.difference_with(b))
    }

    pub fn symmetric_difference(&self, other: &GSet) -> Result<GSet> {
        self.combine(other, |a, b| a.symmetric_difference_with(b))
    }

    pub fn complement(&self) -> GSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        Self::from_bits(&self.group, bits)
    }

    pub fn is_subset(&self, other: &GSet) -> bool {
        self.group == other.group && self.bits.is_subset(&other.bits)
    }

    pub fn intersection_len(&self, other: &GSet) -> usize {
        self.bits.intersection_count(&other.bits)
    }

    /// `X⁻¹ = { x⁻¹ : x ∈ X }`.
    pub fn inverse(&self) -> GSet {
        let g = &self.group;
        let mut bits = FixedBitSet::with_capacity(g.order());
        for x in self.iter() {
            bits.insert(g.inv(x));
        }
        GSet::from_bits(g, bits)
    }

    /// `tX`.
    pub fn left_translate(&self, t: Element) -> Result<GSet> {
        let g = &self.group;
        g.check(t)?;
        GSet::new(g, self.iter().map(|x| g.op(t, x)))
    }

    /// `Xt`.
    pub fn right_translate(&self, t: Element) -> Result<GSet> {
        let g = &self.group;
        g.check(t)?;
        GSet::new(g, self.iter().map(|x| g.op(x, t)))
    }
}

impl PartialEq for GSet {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.bits == other.bits
    }
}

impl Eq for GSet {}

impl Hash for GSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
    }
}

impl fmt::Debug for GSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for GSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

/// `X · Y = { xy : x ∈ X, y ∈ Y }`.
pub fn product_set(x: &GSet, y: &GSet) -> Result<GSet> {
    x.same_group(y)?;
    let g = x.group();
    let mut bits = FixedBitSet::with_capacity(g.order());
    let ys = y.to_vec();
    for a in x.iter() {
        for &b in &ys {
            bits.insert(g.op(a, b));
        }
    }
    Ok(GSet::from_bits(g, bits))
}

/// `A · B⁻¹ = { ab⁻¹ : a ∈ A, b ∈ B }`.
pub fn quotient_set(a: &GSet, b: &GSet) -> Result<GSet> {
    product_set(a, &b.inverse())
}

/// `X^k`, the `k`-fold product set.
pub fn iterate_product(x: &GSet, k: usize) -> Result<GSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("iterated product needs k >= 1".into()));
    }
    let mut acc = x.clone();
    for _ in 1..k {
        acc = product_set(&acc, x)?;
    }
    Ok(acc)
}

/// The subgroup generated by `gens`.
pub fn generated_subgroup(group: &Arc<Group>, gens: &[Element]) -> Result<GSet> {
    for &g in gens {
        group.check(g)?;
    }
    let mut bits = FixedBitSet::with_capacity(group.order());
    bits.insert(group.identity());
    let mut frontier = vec![group.identity()];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = group.op(x, g);
            if !bits.put(y) {
                frontier.push(y);
            }
        }
    }
    Ok(GSet::from_bits(group, bits))
}

/// Whether a set is a subgroup. Picks generators greedily and checks that
/// the set is closed under right multiplication by each of them, which costs
/// `O(|H| log |H|)` operations instead of `|H|²`.
pub fn is_subgroup(set: &GSet) -> bool {
    let g = set.group();
    if !set.contains(g.identity()) {
        return false;
    }
    let mut gens = Vec::new();
    let mut span = GSet::singleton(g, g.identity()).expect("identity is in range");
    for h in set.iter() {
        if !span.contains(h) {
            gens.push(h);
            span = generated_subgroup(g, &gens).expect("elements are in range");
            if !span.is_subset(set) {
                return false;
            }
        }
    }
    span.len() == set.len()
}

/// An integer-valued function on a group together with a positive
/// denominator; `values[x] / denominator` is the represented function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountFn {
    group: Arc<Group>,
    values: Vec<i64>,
    denominator: i64,
}

impl Serialize for CountFn {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CountFn", 2)?;
        st.serialize_field("denominator", &self.denominator)?;
        st.serialize_field("values", &self.values)?;
        st.end()
    }
}

impl CountFn {
    pub fn new(group: &Arc<Group>, values: Vec<i64>, denominator: i64) -> Result<CountFn> {
        if values.len() != group.order() {
            return Err(Error::InvalidArgument(format!(
                "count function has {} values for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        if denominator <= 0 {
            return Err(Error::InvalidArgument("denominator must be positive".into()));
        }
        Ok(CountFn {
            group: Arc::clone(group),
            values,
            denominator,
        })
    }

    pub fn indicator(set: &GSet) -> CountFn {
        let values = set
            .group()
            .elements()
            .map(|x| set.contains(x) as i64)
            .collect();
        CountFn {
            group: Arc::clone(set.group()),
            values,
            denominator: 1,
        }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    pub fn value(&self, x: Element) -> i64 {
        self.values[x]
    }

    pub fn total(&self) -> i128 {
        self.values.iter().map(|&v| v as i128).sum()
    }

    pub fn support(&self) -> GSet {
        GSet::from_predicate(&self.group, |x| self.values[x] != 0)
    }

    pub fn with_denominator(mut self, denominator: i64) -> Result<CountFn> {
        if denominator <= 0 {
            return Err(Error::InvalidArgument("denominator must be positive".into()));
        }
        self.denominator = denominator;
        Ok(self)
    }

    /// `g̃(x) = g(x⁻¹)`.
    pub fn reflect(&self) -> CountFn {
        let g = &self.group;
        CountFn {
            group: Arc::clone(g),
            values: g.elements().map(|x| self.values[g.inv(x)]).collect(),
            denominator: self.denominator,
        }
    }

    /// `τ_t f`, i.e. `x ↦ f(t·x)`.
    pub fn translate(&self, t: Element) -> Result<CountFn> {
        let g = &self.group;
        g.check(t)?;
        Ok(CountFn {
            group: Arc::clone(g),
            values: g.elements().map(|x| self.values[g.op(t, x)]).collect(),
            denominator: self.denominator,
        })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let d = self.denominator as f64;
        self.values.iter().map(|&v| v as f64 / d).collect()
    }
}

/// Counts `x ↦ |A ∩ xB|` with denominator `|A|`, i.e. `μ_A ∘ 1_B`.
pub fn skew_convolve_counts(a: &GSet, b: &GSet) -> Result<CountFn> {
    a.same_group(b)?;
    a.require_nonempty("μ_A needs a non-empty A")?;
    let g = a.group();
    let mut values = vec![0i64; g.order()];
    let binv: Vec<Element> = b.iter().map(|y| g.inv(y)).collect();
    for x in a.iter() {
        for &y in &binv {
            values[g.op(x, y)] += 1;
        }
    }
    CountFn::new(g, values, a.len() as i64)
}

/// `max_x |f(tx) − f(x)| / denominator`, exactly.
pub fn linf_shift_deviation(f: &CountFn, t: Element) -> Result<Rational> {
    let g = f.group();
    g.check(t)?;
    let worst = g
        .elements()
        .map(|x| (f.values[g.op(t, x)] - f.values[x]).abs())
        .max()
        .unwrap_or(0);
    Ok(Rational::new(worst, f.denominator))
}

/// Whether `‖τ_t f − f‖_∞ ≤ eps`, decided in integer arithmetic with early exit.
pub fn shift_within(f: &CountFn, t: Element, eps: &Rational) -> bool {
    let g = f.group();
    let lhs_scale = *eps.denom() as i128;
    let rhs = *eps.numer() as i128 * f.denominator as i128;
    g.elements()
        .all(|x| ((f.values[g.op(t, x)] - f.values[x]).abs() as i128) * lhs_scale <= rhs)
}

/// `f * g(x) = Σ_y f(y) g(y⁻¹x)` by direct summation; the denominators
/// multiply.
pub fn naive_convolve(f: &CountFn, g: &CountFn) -> Result<CountFn> {
    f.group.same_group(&g.group)?;
    let grp = &f.group;
    let mut acc = vec![0i128; grp.order()];
    let gs: Vec<(Element, i128)> = g
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .map(|(z, &v)| (z, v as i128))
        .collect();
    for (y, &fy) in f.values.iter().enumerate() {
        if fy == 0 {
            continue;
        }
        for &(z, gz) in &gs {
            acc[grp.op(y, z)] += fy as i128 * gz;
        }
    }
    let denominator = f
        .denominator
        .checked_mul(g.denominator)
        .ok_or_else(|| Error::Overflow("convolution denominator".into()))?;
    let values = acc
        .into_iter()
        .map(|v| i64::try_from(v).map_err(|_| Error::Overflow("convolution value".into())))
        .collect::<Result<Vec<_>>>()?;
    CountFn::new(grp, values, denominator)
}

/// A way of computing `f * g` for integer-valued functions.
pub trait ConvolutionBackend: Named + Send + Sync {
    fn convolve(&self, f: &CountFn, g: &CountFn) -> Result<CountFn>;
}

pub struct NaiveConvolution;

impl Named for NaiveConvolution {
    fn name(&self) -> &'static str {
        "naive"
    }
}

impl ConvolutionBackend for NaiveConvolution {
    fn convolve(&self, f: &CountFn, g: &CountFn) -> Result<CountFn> {
        naive_convolve(f, g)
    }
}

pub fn convolution_backends() -> &'static Registry<dyn ConvolutionBackend> {
    static REG: OnceLock<Registry<dyn ConvolutionBackend>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut reg: Registry<dyn ConvolutionBackend> = Registry::new("convolution");
        reg.register(Arc::new(NaiveConvolution));
        reg.register(Arc::new(crate::fourier::FourierConvolution));
        reg
    })
}

/// Groups at least this large use the Fourier backend when possible.
pub const FOURIER_CONVOLUTION_THRESHOLD: usize = 64;

/// `f * g`, using the Fourier backend for large groups with coordinates.
pub fn convolve(f: &CountFn, g: &CountFn) -> Result<CountFn> {
    let grp = f.group();
    if grp.moduli().is_some() && grp.order() >= FOURIER_CONVOLUTION_THRESHOLD {
        crate::fourier::FourierConvolution.convolve(f, g)
    } else {
        naive_convolve(f, g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: &Arc<Group>, xs: &[usize]) -> GSet {
        GSet::new(g, xs.iter().copied()).unwrap()
    }

    #[test]
    fn quotient_sets() {
        let z6 = Group::cyclic(6).unwrap();
        let h = set(&z6, &[0, 2, 4]);
        assert_eq!(quotient_set(&h, &h).unwrap(), h);
        let z5 = Group::cyclic(5).unwrap();
        assert_eq!(
            quotient_set(&set(&z5, &[0, 1]), &set(&z5, &[0])).unwrap(),
            set(&z5, &[0, 1])
        );
        let z7 = Group::cyclic(7).unwrap();
        let a = set(&z7, &[0, 1, 3]);
        assert_eq!(quotient_set(&a, &a).unwrap(), GSet::full(&z7));
        let other = Group::cyclic(8).unwrap();
        assert!(matches!(
            quotient_set(&a, &set(&other, &[0])),
            Err(Error::GroupMismatch)
        ));
    }

    #[test]
    fn iterated_products() {
        let z6 = Group::cyclic(6).unwrap();
        assert_eq!(iterate_product(&set(&z6, &[0]), 5).unwrap(), set(&z6, &[0]));
        assert_eq!(iterate_product(&set(&z6, &[1]), 3).unwrap(), set(&z6, &[3]));
        let z10 = Group::cyclic(10).unwrap();
        assert_eq!(
            iterate_product(&set(&z10, &[0, 1]), 3).unwrap(),
            set(&z10, &[0, 1, 2, 3])
        );
        assert!(iterate_product(&set(&z10, &[0]), 0).is_err());
    }

    #[test]
    fn skew_counts() {
        let z5 = Group::cyclic(5).unwrap();
        let a = set(&z5, &[0, 1]);
        let f = skew_convolve_counts(&a, &a).unwrap();
        assert_eq!(f.values(), &[2, 1, 0, 0, 1]);
        assert_eq!(f.denominator(), 2);
        assert!(skew_convolve_counts(&GSet::empty(&z5), &a).is_err());

        // Coset of a subgroup: value |H| on H, zero elsewhere.
        let z12 = Group::cyclic(12).unwrap();
        let coset = set(&z12, &[1, 4, 7, 10]);
        let f = skew_convolve_counts(&coset, &coset).unwrap();
        for x in z12.elements() {
            assert_eq!(f.value(x), if x % 3 == 0 { 4 } else { 0 });
        }
    }

    #[test]
    fn shift_deviation() {
        let z7 = Group::cyclic(7).unwrap();
        let a = set(&z7, &[0, 1, 2]);
        let f = skew_convolve_counts(&a, &a).unwrap();
        assert_eq!(f.values(), &[3, 2, 1, 0, 0, 1, 2]);
        assert_eq!(linf_shift_deviation(&f, 0).unwrap(), Rational::from_integer(0));
        assert_eq!(linf_shift_deviation(&f, 1).unwrap(), Rational::new(1, 3));
        assert!(shift_within(&f, 1, &Rational::new(1, 3)));
        assert!(!shift_within(&f, 1, &Rational::new(1, 4)));

        let z6 = Group::cyclic(6).unwrap();
        let h = set(&z6, &[0, 3]);
        let f = skew_convolve_counts(&h, &h).unwrap();
        assert_eq!(linf_shift_deviation(&f, 1).unwrap(), Rational::from_integer(1));
    }

    #[test]
    fn small_convolutions() {
        let z5 = Group::cyclic(5).unwrap();
        let a = CountFn::indicator(&set(&z5, &[0, 1]));
        assert_eq!(naive_convolve(&a, &a).unwrap().values(), &[1, 2, 1, 0, 0]);
        let delta = CountFn::indicator(&set(&z5, &[0]));
        let f = CountFn::new(&z5, vec![3, 1, 4, 1, 5], 1).unwrap();
        assert_eq!(naive_convolve(&delta, &f).unwrap(), f);
        let z8 = Group::cyclic(8).unwrap();
        let h = CountFn::indicator(&set(&z8, &[0, 2, 4, 6]));
        let hh = naive_convolve(&h, &h).unwrap();
        assert_eq!(hh.values(), &[4, 0, 4, 0, 4, 0, 4, 0]);
    }

    #[test]
    fn backends_are_registered() {
        let names = convolution_backends().names();
        assert_eq!(names, vec!["naive", "fourier"]);
    }

    #[test]
    fn non_abelian_skew_convolution_matches_definition() {
        let s3 = Group::symmetric(3).unwrap();
        let a = set(&s3, &[0, 1, 3]);
        let b = set(&s3, &[1, 2]);
        let f = skew_convolve_counts(&a, &b).unwrap();
        for x in s3.elements() {
            let xb = b.left_translate(x).unwrap();
            assert_eq!(f.value(x) as usize, a.intersection_len(&xb));
        }
        let via_reflect = naive_convolve(&CountFn::indicator(&a), &CountFn::indicator(&b).reflect()).unwrap();
        assert_eq!(via_reflect.values(), f.values());
    }
}
