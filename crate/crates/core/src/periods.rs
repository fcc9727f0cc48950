//! Almost-periods of `μ_A ∘ 1_B`.
//!
//! Three routes: the exact set of ε-periods by brute force, the randomized
//! sampler (a random tuple from `A` whose empirical convolution is uniformly
//! close to the true one, and all translates of it that stay close), and the
//! Fourier bootstrap from sampled periods to a regular Bohr set of periods.

use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::bohr::{find_regular_dilate, BohrSpec};
use crate::error::{Error, Result};
use crate::fourier::{chang_cover, large_spectrum, ChangCover};
use crate::group::{DualElement, Element, Group};
use crate::rational::{self, Rational};
use crate::registry::{Named, Registry};
use crate::setcalc::{iterate_product, product_set, quotient_set, shift_within, skew_convolve_counts, CountFn, GSet};

pub const DEFAULT_C_SAMPLE: u64 = 64;
pub const DEFAULT_RETRIES: u32 = 10;
/// Bits of precision for the rational lower bound on `η^{1/2}`.
const SQRT_BITS: u32 = 30;

/// `{t : ‖τ_t(μ_A∘1_B) − μ_A∘1_B‖_∞ ≤ ε}`.
pub fn exact_almost_periods(a: &GSet, b: &GSet, eps: &Rational) -> Result<GSet> {
    let f = skew_convolve_counts(a, b)?;
    Ok(periods_of(&f, eps))
}

fn periods_of(f: &CountFn, eps: &Rational) -> GSet {
    let g = f.group();
    let keep: Vec<bool> = g
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&t| shift_within(f, t, eps))
        .collect();
    GSet::from_predicate(g, |t| keep[t])
}

/// Multiplicities of the entries of a tuple.
fn histogram(group: &Group, tuple: &[Element]) -> Result<Vec<u64>> {
    let mut h = vec![0u64; group.order()];
    for &x in tuple {
        h[group.check(x)?] += 1;
    }
    Ok(h)
}

/// `c(y) = #{j : a_j ∈ yB}`, so that `μ_a ∘ 1_B = c / n`.
fn tuple_counts(group: &Group, hist: &[u64], b: &GSet) -> Vec<i64> {
    let binv: Vec<Element> = b.iter().map(|y| group.inv(y)).collect();
    let mut c = vec![0i64; group.order()];
    for (z, &m) in hist.iter().enumerate() {
        if m == 0 {
            continue;
        }
        for &yi in &binv {
            c[group.op(z, yi)] += m as i64;
        }
    }
    c
}

/// Tests `‖μ_{t⁻¹a} ∘ 1_B − μ_A ∘ 1_B‖_∞ ≤ θ` using `μ_{t⁻¹a}∘1_B(x) = c(tx)/n`,
/// over a common denominator `n·|A|`.
struct Goodness<'a> {
    group: &'a Group,
    exact: &'a CountFn,
    counts: Vec<i64>,
    n: i128,
    threshold: Rational,
}

impl Goodness<'_> {
    fn translate_is_good(&self, t: Element) -> bool {
        let a_len = self.exact.denominator() as i128;
        let scale = *self.threshold.denom() as i128;
        let rhs = *self.threshold.numer() as i128 * self.n * a_len;
        self.group.elements().all(|x| {
            let emp = self.counts[self.group.op(t, x)] as i128 * a_len;
            let truth = self.exact.value(x) as i128 * self.n;
            (emp - truth).abs() * scale <= rhs
        })
    }
}

/// Whether the tuple is good: its empirical convolution is within
/// `eps_half` of `μ_A ∘ 1_B` everywhere on `G`. Entries may lie outside `A`.
pub fn tuple_is_good(tuple: &[Element], a: &GSet, b: &GSet, eps_half: &Rational) -> Result<bool> {
    if tuple.is_empty() {
        return Err(Error::InvalidArgument("empty tuple".into()));
    }
    let g = a.group();
    let exact = skew_convolve_counts(a, b)?;
    let hist = histogram(g, tuple)?;
    let test = Goodness {
        group: g,
        exact: &exact,
        counts: tuple_counts(g, &hist, b),
        n: tuple.len() as i128,
        threshold: *eps_half,
    };
    Ok(test.translate_is_good(g.identity()))
}

#[derive(Clone, Debug, Serialize)]
pub struct SamplerConfig {
    pub c_sample: u64,
    pub retries: u32,
    /// Periods are certified for `(T⁻¹T)^k`; tuples are tested at `ε/(2k)`.
    pub k: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            c_sample: DEFAULT_C_SAMPLE,
            retries: DEFAULT_RETRIES,
            k: 1,
        }
    }
}

/// `n = ⌈c·d·k²/ε²⌉`.
pub fn sample_size(eps: &Rational, d_hint: usize, k: usize, c_sample: u64) -> Result<u64> {
    let num = (c_sample as u128) * (d_hint as u128) * (k as u128).pow(2) * (*eps.denom() as u128).pow(2);
    let den = (*eps.numer() as u128).pow(2);
    let n = num.div_ceil(den);
    u64::try_from(n).map_err(|_| Error::Overflow("sample size".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct AlmostPeriodReport {
    #[serde(with = "rational::as_string")]
    pub epsilon: Rational,
    pub k: usize,
    pub sample_size: u64,
    pub d_hint: usize,
    pub c_sample: u64,
    pub seed: u64,
    pub retries: u32,
    /// `|T_a|` for each attempt, in order.
    pub attempt_sizes: Vec<usize>,
    pub chosen_attempt: usize,
    #[serde(rename = "T")]
    pub t: GSet,
    pub s_size: usize,
    #[serde(with = "rational::as_string")]
    pub size_ratio: Rational,
    /// `|S·A|/|A|`, the measured doubling constant `K`.
    #[serde(with = "rational::as_string")]
    pub doubling: Rational,
    /// Elements of `(T⁻¹T)^k` that passed the exact ε check.
    pub validated_set: GSet,
    /// Every element of `(T⁻¹T)^k` passed; a `false` here is a bug.
    pub composition_sound: bool,
}

/// Samples a multinomial histogram of `n` uniform draws from `A` using
/// sequential binomials; equal in distribution to drawing the tuple.
fn sample_histogram(rng: &mut ChaCha8Rng, group: &Group, a: &GSet, n: u64) -> Result<Vec<u64>> {
    let mut h = vec![0u64; group.order()];
    let elems = a.to_vec();
    let mut remaining = n;
    for (i, &x) in elems.iter().enumerate() {
        let left = (elems.len() - i) as f64;
        let draw = if i + 1 == elems.len() {
            remaining
        } else if remaining == 0 {
            0
        } else {
            Binomial::new(remaining, 1.0 / left)
                .map_err(|e| Error::InvalidArgument(format!("binomial sampler: {e}")))?
                .sample(rng)
        };
        h[x] = draw;
        remaining -= draw;
    }
    Ok(h)
}

/// Samples `a ∈ A^n`, keeps `T_a = {t ∈ S : t⁻¹a is good}` from the attempt
/// with the largest `T_a`, and certifies `(T⁻¹T)^k` exactly.
pub fn sample_almost_periods(
    a: &GSet,
    b: &GSet,
    s: &GSet,
    eps: &Rational,
    d_hint: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<AlmostPeriodReport> {
    a.same_group(b)?;
    a.same_group(s)?;
    a.require_nonempty("sampling needs a non-empty A")?;
    b.require_nonempty("sampling needs a non-empty B")?;
    s.require_nonempty("sampling needs a non-empty S")?;
    if !eps.is_positive() || *eps > Rational::one() {
        return Err(Error::InvalidArgument("ε must lie in (0, 1]".into()));
    }
    if config.k == 0 || config.retries == 0 {
        return Err(Error::InvalidArgument("k and retries must be positive".into()));
    }
    let n = sample_size(eps, d_hint, config.k, config.c_sample)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample size is zero; use d_hint ≥ 1 and c_sample ≥ 1".into(),
        ));
    }
    let g = a.group();
    let exact = skew_convolve_counts(a, b)?;
    let threshold = eps / Rational::from_integer(2 * config.k as i64);
    let candidates = s.to_vec();
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Vec<Element>)> = None;
    let mut sizes = Vec::new();
    for attempt in 0..config.retries {
        master.set_stream(attempt as u64);
        master.set_word_pos(0);
        let hist = sample_histogram(&mut master, g, a, n)?;
        let test = Goodness {
            group: g,
            exact: &exact,
            counts: tuple_counts(g, &hist, b),
            n: n as i128,
            threshold,
        };
        let t: Vec<Element> = candidates
            .par_iter()
            .copied()
            .filter(|&t| test.translate_is_good(t))
            .collect();
        sizes.push(t.len());
        if best.as_ref().is_none_or(|(_, bt)| t.len() > bt.len()) {
            best = Some((attempt as usize, t));
        }
    }
    let (chosen, t) = best.expect("at least one attempt");
    if t.is_empty() {
        return Err(Error::NoPeriods(format!(
            "no good translates in {} attempts with n = {n}; ε may be too small for n or d_hint may underestimate the VC-dimension",
            config.retries
        )));
    }
    let t = GSet::new(g, t)?;
    let composed = iterate_product(&quotient_set(&t.inverse(), &t.inverse())?, config.k)?;
    let validated = periods_of_subset(&exact, &composed, eps);
    let doubling = Rational::new(product_set(s, a)?.len() as i64, a.len() as i64);
    Ok(AlmostPeriodReport {
        epsilon: *eps,
        k: config.k,
        sample_size: n,
        d_hint,
        c_sample: config.c_sample,
        seed,
        retries: config.retries,
        attempt_sizes: sizes,
        chosen_attempt: chosen,
        size_ratio: Rational::new(t.len() as i64, s.len() as i64),
        s_size: s.len(),
        t,
        doubling,
        composition_sound: validated.len() == composed.len(),
        validated_set: validated,
    })
}

fn periods_of_subset(f: &CountFn, candidates: &GSet, eps: &Rational) -> GSet {
    let list = candidates.to_vec();
    let keep: Vec<Element> = list
        .par_iter()
        .copied()
        .filter(|&t| shift_within(f, t, eps))
        .collect();
    GSet::new(f.group(), keep).expect("elements come from the group")
}

#[derive(Clone, Debug, Serialize)]
pub struct BohrPeriodReport {
    pub spec: BohrSpec,
    pub rank: usize,
    /// Radius before the regular dilate was chosen.
    #[serde(with = "rational::as_string")]
    pub base_radius: Rational,
    #[serde(with = "rational::as_string")]
    pub radius: Rational,
    #[serde(with = "rational::as_string")]
    pub tau: Rational,
    pub size: usize,
    pub all_valid: bool,
    /// The realized element with the largest deviation, when it exceeds ε.
    pub worst_offender: Option<(Element, String)>,
    #[serde(with = "rational::as_string")]
    pub eta: Rational,
    pub k: usize,
    pub sampler: AlmostPeriodReport,
    pub spectrum: Vec<DualElement>,
    pub cover: ChangCover,
}

/// `⌈log₂(2/(ε·η^{1/2}))⌉ + 1`.
pub fn bootstrap_k(eps: &Rational, eta: &Rational) -> usize {
    let x = 2.0 / (rational::to_f64(eps) * rational::to_f64(eta).sqrt());
    x.log2().ceil().max(0.0) as usize + 1
}

/// Runs the sampler at ε/3, takes the large spectrum of `μ_T`, covers it
/// by a dissociated set Λ, and returns a regular dilate of
/// `Bohr(Λ, ε η^{1/2} / 3m)` with every element checked exactly.
pub fn bootstrap_bohr_periods(
    a: &GSet,
    b: &GSet,
    eps: &Rational,
    d_hint: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<BohrPeriodReport> {
    bootstrap_bohr_periods_scoped(a, b, &GSet::full(a.group()), eps, d_hint, seed, config)
}

/// As [`bootstrap_bohr_periods`], drawing sampler translates from `s`
/// instead of the whole group (the small-sumset form `|A + S| ≤ K|A|`).
pub fn bootstrap_bohr_periods_scoped(
    a: &GSet,
    b: &GSet,
    s: &GSet,
    eps: &Rational,
    d_hint: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<BohrPeriodReport> {
    a.same_group(b)?;
    a.same_group(s)?;
    let g = a.group();
    if !g.is_abelian() || g.moduli().is_none() {
        return Err(Error::Unsupported("the Bohr bootstrap needs an abelian group".into()));
    }
    a.require_nonempty("bootstrap needs a non-empty A")?;
    b.require_nonempty("bootstrap needs a non-empty B")?;
    if a.len() > b.len() {
        return Err(Error::InvalidArgument("the bootstrap needs |A| ≤ |B|".into()));
    }
    if !eps.is_positive() || *eps > Rational::one() {
        return Err(Error::InvalidArgument("ε must lie in (0, 1]".into()));
    }
    let eta = Rational::new(a.len() as i64, b.len() as i64);
    let k = bootstrap_k(eps, &eta);
    let third = eps / Rational::from_integer(3);
    let sampler_config = SamplerConfig { k, ..config.clone() };
    let sampler = sample_almost_periods(a, b, s, &third, d_hint, seed, &sampler_config)?;

    let mu_t: Vec<f64> = {
        let w = 1.0 / sampler.t.len() as f64;
        g.elements().map(|x| if sampler.t.contains(x) { w } else { 0.0 }).collect()
    };
    let spectrum = large_spectrum(g, &mu_t, 0.5)?;
    let cover = chang_cover(g, &spectrum)?;
    let m = cover.basis.len();
    let base_radius = third * rational::sqrt_lower(&eta, SQRT_BITS) / Rational::from_integer(m.max(1) as i64);
    let base = BohrSpec::new(g, cover.basis.iter().copied(), base_radius)?;
    let dilate = find_regular_dilate(&base)?;

    let f = skew_convolve_counts(a, b)?;
    let realized = dilate.spec.realize();
    let worst = realized
        .to_vec()
        .par_iter()
        .map(|&t| (crate::setcalc::linf_shift_deviation(&f, t).expect("element in range"), t))
        .max_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
    let worst_offender = worst
        .filter(|(dev, _)| dev > eps)
        .map(|(dev, t)| (t, rational::format_rational(&dev)));
    Ok(BohrPeriodReport {
        rank: dilate.spec.rank(),
        radius: dilate.spec.radius(),
        tau: dilate.tau,
        size: realized.len(),
        all_valid: worst_offender.is_none(),
        worst_offender,
        spec: dilate.spec,
        base_radius,
        eta,
        k,
        sampler,
        spectrum: spectrum.members,
        cover,
    })
}

/// Inputs shared by every almost-period strategy.
#[derive(Clone, Debug)]
pub struct PeriodQuery {
    pub a: GSet,
    pub b: GSet,
    /// Candidate translates for the sampler; defaults to `G`.
    pub s: Option<GSet>,
    pub epsilon: Rational,
    pub d_hint: usize,
    pub seed: u64,
    pub config: SamplerConfig,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum PeriodOutcome {
    Exact {
        #[serde(with = "rational::as_string")]
        epsilon: Rational,
        size: usize,
        periods: GSet,
    },
    Sample(AlmostPeriodReport),
    Bohr(Box<BohrPeriodReport>),
}

pub trait PeriodFinder: Named + Send + Sync {
    fn find(&self, query: &PeriodQuery) -> Result<PeriodOutcome>;
}

pub struct ExactPeriods;
pub struct SampledPeriods;
pub struct BohrPeriods;

impl Named for ExactPeriods {
    fn name(&self) -> &'static str {
        "exact"
    }
}

impl PeriodFinder for ExactPeriods {
    fn find(&self, q: &PeriodQuery) -> Result<PeriodOutcome> {
        let periods = exact_almost_periods(&q.a, &q.b, &q.epsilon)?;
        Ok(PeriodOutcome::Exact {
            epsilon: q.epsilon,
            size: periods.len(),
            periods,
        })
    }
}

impl Named for SampledPeriods {
    fn name(&self) -> &'static str {
        "sample"
    }
}

impl PeriodFinder for SampledPeriods {
    fn find(&self, q: &PeriodQuery) -> Result<PeriodOutcome> {
        let s = q.s.clone().unwrap_or_else(|| GSet::full(q.a.group()));
        sample_almost_periods(&q.a, &q.b, &s, &q.epsilon, q.d_hint, q.seed, &q.config).map(PeriodOutcome::Sample)
    }
}

impl Named for BohrPeriods {
    fn name(&self) -> &'static str {
        "bohr"
    }
}

impl PeriodFinder for BohrPeriods {
    fn find(&self, q: &PeriodQuery) -> Result<PeriodOutcome> {
        bootstrap_bohr_periods(&q.a, &q.b, &q.epsilon, q.d_hint, q.seed, &q.config)
            .map(|r| PeriodOutcome::Bohr(Box::new(r)))
    }
}

pub fn period_finders() -> &'static Registry<dyn PeriodFinder> {
    static REG: OnceLock<Registry<dyn PeriodFinder>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn PeriodFinder> = Registry::new("periods");
        r.register(Arc::new(ExactPeriods))
            .register(Arc::new(SampledPeriods))
            .register(Arc::new(BohrPeriods));
        r
    })
}

/// `|T|/|S|` as a float, for logging scaling data.
pub fn size_ratio_f64(report: &AlmostPeriodReport) -> f64 {
    report.size_ratio.to_f64().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(g: &Arc<Group>, xs: impl IntoIterator<Item = usize>) -> GSet {
        GSet::new(g, xs).unwrap()
    }

    /// Periods straight from the definition, in rationals.
    fn oracle(a: &GSet, b: &GSet, eps: &Rational) -> Vec<usize> {
        let g = a.group();
        let conv = |x: usize| Rational::new(a.intersection_len(&b.left_translate(x).unwrap()) as i64, a.len() as i64);
        g.elements()
            .filter(|&t| g.elements().all(|x| (conv(g.op(t, x)) - conv(x)).abs() <= *eps))
            .collect()
    }

    #[test]
    fn exact_periods_match_oracle() {
        let z12 = Group::cyclic(12).unwrap();
        let a = set(&z12, 0..4);
        let eps = Rational::new(1, 4);
        assert_eq!(exact_almost_periods(&a, &a, &eps).unwrap().to_vec(), oracle(&a, &a, &eps));
        assert_eq!(exact_almost_periods(&a, &a, &eps).unwrap().to_vec(), vec![0, 1, 11]);
        assert_eq!(exact_almost_periods(&a, &a, &Rational::one()).unwrap().len(), 12);
        let h = set(&z12, [0, 4, 8]);
        assert_eq!(exact_almost_periods(&h, &h, &Rational::new(9, 10)).unwrap(), h);
    }

    #[test]
    fn goodness_of_tuples() {
        let z20 = Group::cyclic(20).unwrap();
        let a = set(&z20, [0, 1, 2, 5, 9]);
        let tiny = Rational::new(1, 1000);
        assert!(tuple_is_good(&[9, 5, 2, 1, 0], &a, &a, &tiny).unwrap());
        assert!(!tuple_is_good(&[0; 5], &a, &a, &Rational::new(1, 10)).unwrap());
    }

    #[test]
    fn sample_size_formula() {
        assert_eq!(sample_size(&Rational::new(1, 4), 2, 1, 64).unwrap(), 2048);
        assert_eq!(sample_size(&Rational::new(1, 3), 1, 2, 1).unwrap(), 36);
        assert_eq!(sample_size(&Rational::new(2, 3), 1, 1, 1).unwrap(), 3);
    }

    #[test]
    fn histograms_have_the_right_total() {
        let z50 = Group::cyclic(50).unwrap();
        let a = set(&z50, [3, 7, 11, 40]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = sample_histogram(&mut rng, &z50, &a, 10_000).unwrap();
        assert_eq!(h.iter().sum::<u64>(), 10_000);
        for x in a.iter() {
            assert!((2200..2800).contains(&h[x]), "{}", h[x]);
        }
        assert_eq!(h.iter().enumerate().filter(|&(x, &c)| c > 0 && !a.contains(x)).count(), 0);
    }

    #[test]
    fn subgroup_periods() {
        let g = Group::vector_space(2, 4).unwrap();
        let h = set(&g, [0, 1, 2, 3]);
        let r = sample_almost_periods(&h, &h, &h, &Rational::new(1, 2), 1, 3, &SamplerConfig::default()).unwrap();
        assert_eq!(r.t, h);
        assert_eq!(r.validated_set, h);
        assert!(r.composition_sound);
    }

    #[test]
    fn sampled_periods_of_a_progression() {
        let g = Group::cyclic(997).unwrap();
        let ap = set(&g, 0..50);
        let eps = Rational::new(1, 4);
        let r = sample_almost_periods(&ap, &ap, &GSet::full(&g), &eps, 2, 7, &SamplerConfig::default()).unwrap();
        assert!(!r.t.is_empty() && r.composition_sound);
        let exact = exact_almost_periods(&ap, &ap, &eps).unwrap();
        let diffs = quotient_set(&r.t, &r.t).unwrap();
        assert!(diffs.is_subset(&exact));
        assert!(r.validated_set.contains(0));
        // Same seed, same report.
        let again = sample_almost_periods(&ap, &ap, &GSet::full(&g), &eps, 2, 7, &SamplerConfig::default()).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn bootstrap_on_a_subgroup() {
        let g = Group::vector_space(2, 6).unwrap();
        let h = set(&g, 0..8);
        let r = bootstrap_bohr_periods(&h, &h, &Rational::new(1, 2), 1, 11, &SamplerConfig::default()).unwrap();
        assert!(r.all_valid);
        let realized = r.spec.realize();
        assert!(realized.is_subset(&h));
        assert!(crate::setcalc::is_subgroup(&realized));
    }

    #[test]
    fn bootstrap_on_a_progression() {
        let g = Group::cyclic(601).unwrap();
        let ap = set(&g, 0..40);
        let eps = Rational::new(1, 2);
        let r = bootstrap_bohr_periods(&ap, &ap, &eps, 2, 5, &SamplerConfig::default()).unwrap();
        assert!(r.all_valid);
        assert!(r.spec.realize().is_subset(&exact_almost_periods(&ap, &ap, &eps).unwrap()));
        assert_eq!(crate::bohr::regularity_defect(&r.spec, crate::bohr::DEFAULT_GRID_POINTS), 0.0);
    }

    #[test]
    fn registry_dispatch() {
        let z12 = Group::cyclic(12).unwrap();
        let a = set(&z12, 0..4);
        let q = PeriodQuery {
            a: a.clone(),
            b: a,
            s: None,
            epsilon: Rational::new(1, 4),
            d_hint: 2,
            seed: 0,
            config: SamplerConfig::default(),
        };
        match period_finders().get("exact").unwrap().find(&q).unwrap() {
            PeriodOutcome::Exact { size, .. } => assert_eq!(size, 3),
            _ => panic!("wrong variant"),
        }
        assert!(period_finders().get("nope").is_err());
    }
}
