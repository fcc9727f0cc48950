//! Arithmetic regularity decompositions `A ≈ A′ + H` and Bogolyubov-type
//! structures inside `A − A`.
//!
//! Everything is built from the Bohr bootstrap: a regular Bohr set `T` of
//! δ-almost-periods of `μ_A ∘ 1_A`, the popular part `A′` of `A` along `T`,
//! and a small regular dilate `H` of `T`. Theorem-level bounds carry
//! unspecified constants, so they are reported as flags; the set-theoretic
//! conclusions (`A′ ⊆ A`, `W ⊆ A + H`, exact symmetric differences,
//! `H ⊆ A − A`) are always computed exactly.

use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bohr::{find_regular_dilate, BohrSpec};
use crate::error::{Error, Result};
use crate::freiman::{model_embed, ModelEmbedding, DEFAULT_MAX_ATTEMPTS};
use crate::group::{Element, Group};
use crate::linalg::annihilator_basis;
use crate::periods::{bootstrap_bohr_periods_scoped, BohrPeriodReport, SamplerConfig};
use crate::rational::{self, Rational};
use crate::registry::{Named, Registry};
use crate::setcalc::{is_subgroup, product_set, quotient_set, GSet};
use crate::vc::d_hint;

/// Options shared by the regularity and Bogolyubov pipelines.
#[derive(Clone, Debug, Default)]
pub struct RegularityConfig {
    pub sampler: SamplerConfig,
    /// VC-dimension bound handed to the sampler; computed from `A` when
    /// absent.
    pub d_hint: Option<usize>,
    /// The `D` of the `H_D` density clause; defaults to `24m/ε`.
    pub dilate_factor: Option<Rational>,
    /// Sampler translates `S` for the `|A + S| ≤ K|A|` form; defaults to `G`.
    pub scope: Option<GSet>,
}

fn resolve_d_hint(a: &GSet, config: &RegularityConfig) -> Result<usize> {
    match config.d_hint {
        Some(d) => Ok(d.max(1)),
        None => d_hint(a),
    }
}

fn bootstrap(a: &GSet, eps: &Rational, seed: u64, config: &RegularityConfig) -> Result<BohrPeriodReport> {
    let d = resolve_d_hint(a, config)?;
    let scope = config.scope.clone().unwrap_or_else(|| GSet::full(a.group()));
    bootstrap_bohr_periods_scoped(a, a, &scope, eps, d, seed, &config.sampler)
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityChecks {
    pub a_prime_subset_a: bool,
    pub w_subset_a_plus_h: bool,
    /// `|A △ W| ≤ ε|A|`.
    pub symdiff_within_eps: bool,
    /// `|A′| ≥ (1 − ε)|A|`.
    pub a_prime_large: bool,
    pub h_in_difference_set: bool,
    /// `|A ∩ (x + H_D)| ≥ (1 − ε)|H_D|` for every `x ∈ W`.
    pub dilate_density: bool,
    /// Every element of `T` was an exact δ-almost-period.
    pub bootstrap_valid: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CosetDensity {
    pub representative: Vec<usize>,
    pub count: usize,
    #[serde(with = "rational::as_string")]
    pub density: Rational,
    pub in_w: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityDecomposition {
    pub method: &'static str,
    #[serde(with = "rational::as_string")]
    pub epsilon: Rational,
    #[serde(with = "rational::as_string")]
    pub nu: Rational,
    #[serde(with = "rational::as_string")]
    pub delta: Rational,
    /// Rank of `T` (and of `H`).
    pub rank: usize,
    #[serde(rename = "T")]
    pub t: BohrSpec,
    pub t_size: usize,
    #[serde(rename = "H")]
    pub h: BohrSpec,
    pub h_size: usize,
    /// Factor applied to the radius of `T` before the regular dilate search.
    #[serde(with = "rational::as_string")]
    pub h_scale: Rational,
    #[serde(with = "rational::as_string")]
    pub h_tau: Rational,
    /// Subspace basis of `H` (vector spaces with `ν = 0` only).
    pub h_basis: Option<Vec<Vec<usize>>>,
    pub codimension: Option<u32>,
    #[serde(with = "rational::as_string")]
    pub dilate_factor: Rational,
    pub dilate_size: usize,
    pub a_size: usize,
    #[serde(rename = "A_prime")]
    pub a_prime: GSet,
    #[serde(rename = "W")]
    pub w: GSet,
    pub symdiff: usize,
    #[serde(with = "rational::as_string")]
    pub symdiff_ratio: Rational,
    pub checks: RegularityChecks,
    pub coset_densities: Option<Vec<CosetDensity>>,
    pub bootstrap: BohrPeriodReport,
}

fn require_epsilon(eps: &Rational) -> Result<()> {
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(Error::InvalidArgument("ε must lie in (0, 1)".into()));
    }
    Ok(())
}

/// `x ↦ |A ∩ (x + X)|` evaluated on `points`, minimised.
fn min_overlap(a: &GSet, points: &GSet, x_set: &GSet) -> usize {
    let g = a.group();
    let xs = x_set.to_vec();
    points
        .to_vec()
        .par_iter()
        .map(|&p| xs.iter().filter(|&&h| a.contains(g.op(p, h))).count())
        .min()
        .unwrap_or(usize::MAX)
}

/// Runs the regularity argument with parameters `ε, ν`:
/// `δ = ε²/100`, `T` from the bootstrap at δ,
/// `A′ = {a ∈ A : 1_A * μ_T(a) ≥ 1 − δ^{1/2}}`, `H` a regular dilate of
/// `T_τ` with `τ = ν δ^{1/2} / 24m`, and `W = A′ + H`.
pub fn regularity_bohr(a: &GSet, eps: &Rational, nu: &Rational, seed: u64, config: &RegularityConfig) -> Result<RegularityDecomposition> {
    require_epsilon(eps)?;
    if nu.is_negative() || *nu > Rational::one() {
        return Err(Error::InvalidArgument("ν must lie in [0, 1]".into()));
    }
    a.require_nonempty("regularity needs a non-empty set")?;
    let g = a.group().clone();
    let delta = eps * eps / Rational::from_integer(100);
    // δ^{1/2} = ε/10 exactly.
    let sqrt_delta = eps / Rational::from_integer(10);
    let boot = bootstrap(a, &delta, seed, config)?;
    let t_spec = boot.spec.clone();
    let t_set = t_spec.realize();
    let m = t_spec.rank();

    // 1_A * μ_T(x) ≥ 1 − δ^{1/2}  ⇔  |A ∩ (x − T)| ≥ (1 − δ^{1/2})|T|, and T = −T.
    let need = (Rational::one() - sqrt_delta) * Rational::from_integer(t_set.len() as i64);
    let t_elems = t_set.to_vec();
    let a_elems = a.to_vec();
    let keep: Vec<Element> = a_elems
        .par_iter()
        .copied()
        .filter(|&x| {
            let hits = t_elems.iter().filter(|&&t| a.contains(g.op(x, t))).count();
            Rational::from_integer(hits as i64) >= need
        })
        .collect();
    let a_prime = GSet::new(&g, keep)?;

    let h_scale = nu * sqrt_delta / Rational::from_integer(24 * m.max(1) as i64);
    let h_dilate = find_regular_dilate(&t_spec.dilate(h_scale)?)?;
    let h_spec = h_dilate.spec.clone();
    let h_set = h_spec.realize();

    let w = if a_prime.is_empty() {
        GSet::empty(&g)
    } else {
        product_set(&a_prime, &h_set)?
    };
    let symdiff = a.symmetric_difference(&w)?.len();
    let symdiff_ratio = Rational::new(symdiff as i64, a.len() as i64);

    let dilate_factor = config
        .dilate_factor
        .unwrap_or_else(|| Rational::from_integer(24 * m.max(1) as i64) / eps);
    let hd_set = h_spec.dilate(dilate_factor)?.realize();
    let one_minus = Rational::one() - eps;
    let dilate_density = w.is_empty()
        || Rational::from_integer(min_overlap(a, &w, &hd_set) as i64) >= one_minus * Rational::from_integer(hd_set.len() as i64);

    let difference = quotient_set(a, a)?;
    let checks = RegularityChecks {
        a_prime_subset_a: a_prime.is_subset(a),
        w_subset_a_plus_h: w.is_subset(&product_set(a, &h_set)?),
        symdiff_within_eps: symdiff_ratio <= *eps,
        a_prime_large: Rational::from_integer(a_prime.len() as i64) >= one_minus * Rational::from_integer(a.len() as i64),
        h_in_difference_set: h_set.is_subset(&difference),
        dilate_density,
        bootstrap_valid: boot.all_valid,
    };
    Ok(RegularityDecomposition {
        method: "bohr",
        epsilon: *eps,
        nu: *nu,
        delta,
        rank: m,
        t_size: t_set.len(),
        t: t_spec,
        h_size: h_set.len(),
        h: h_spec,
        h_scale,
        h_tau: h_dilate.tau,
        h_basis: None,
        codimension: None,
        dilate_factor,
        dilate_size: hd_set.len(),
        a_size: a.len(),
        a_prime,
        w,
        symdiff,
        symdiff_ratio,
        checks,
        coset_densities: None,
        bootstrap: boot,
    })
}

fn coords_of(g: &Group, x: Element) -> Vec<usize> {
    g.coords(x).unwrap_or_default()
}

/// Densities of `A` on every coset of `h` that meets `A` or `w`.
fn coset_table(a: &GSet, w: &GSet, h: &GSet) -> Result<Vec<CosetDensity>> {
    let g = a.group();
    let mut seen = GSet::empty(g);
    let mut rows = Vec::new();
    for x in a.union(w)?.iter() {
        if seen.contains(x) {
            continue;
        }
        let coset = h.left_translate(x)?;
        let rep = coset.first().expect("cosets are non-empty");
        let count = coset.intersection_len(a);
        rows.push(CosetDensity {
            representative: coords_of(g, rep),
            count,
            density: Rational::new(count as i64, h.len() as i64),
            in_w: w.contains(rep),
        });
        seen = seen.union(&coset)?;
    }
    rows.sort_by(|x, y| x.representative.cmp(&y.representative));
    Ok(rows)
}

/// The `ν = 0` case over `F_p^n`: `H` is the annihilator of the frequencies
/// of `T`, so `W` is a union of `H`-cosets.
pub fn regularity_subspace(a: &GSet, eps: &Rational, seed: u64, config: &RegularityConfig) -> Result<RegularityDecomposition> {
    let g = a.group().clone();
    let (p, n) = g.require_vector_space()?;
    let mut dec = regularity_bohr(a, eps, &Rational::zero(), seed, config)?;
    let basis = annihilator_basis(&g, dec.h.freqs())?;
    let h_set = dec.h.realize();
    debug_assert_eq!((p as u128).pow(basis.len() as u32), h_set.len() as u128);
    dec.method = "subspace";
    dec.codimension = Some(n - basis.len() as u32);
    dec.h_basis = Some(basis.iter().map(|&b| coords_of(&g, b)).collect());
    dec.coset_densities = Some(coset_table(a, &dec.w, &h_set)?);
    Ok(dec)
}

/// Inputs shared by every regularity strategy.
#[derive(Clone, Debug)]
pub struct RegularityQuery {
    pub a: GSet,
    pub epsilon: Rational,
    pub nu: Rational,
    pub seed: u64,
    pub config: RegularityConfig,
}

pub trait RegularityMethod: Named + Send + Sync {
    fn decompose(&self, query: &RegularityQuery) -> Result<RegularityDecomposition>;
}

pub struct BohrRegularity;
pub struct SubspaceRegularity;

impl Named for BohrRegularity {
    fn name(&self) -> &'static str {
        "bohr"
    }
}

impl RegularityMethod for BohrRegularity {
    fn decompose(&self, q: &RegularityQuery) -> Result<RegularityDecomposition> {
        regularity_bohr(&q.a, &q.epsilon, &q.nu, q.seed, &q.config)
    }
}

impl Named for SubspaceRegularity {
    fn name(&self) -> &'static str {
        "subspace"
    }
}

impl RegularityMethod for SubspaceRegularity {
    fn decompose(&self, q: &RegularityQuery) -> Result<RegularityDecomposition> {
        regularity_subspace(&q.a, &q.epsilon, q.seed, &q.config)
    }
}

pub fn regularity_methods() -> &'static Registry<dyn RegularityMethod> {
    static REG: OnceLock<Registry<dyn RegularityMethod>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn RegularityMethod> = Registry::new("regularity");
        r.register(Arc::new(BohrRegularity)).register(Arc::new(SubspaceRegularity));
        r
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BogolyubovBohr {
    pub spec: BohrSpec,
    pub rank: usize,
    pub size: usize,
    /// Every realized element lies in `A − A`.
    pub in_difference_set: bool,
    /// Every realized `t` has `μ_A ∘ 1_A(t) ≥ 1/2`.
    pub well_represented: bool,
    /// A realized element with `μ_A ∘ 1_A(t) < 1/2`, if any.
    pub offender: Option<Element>,
    pub bootstrap: BohrPeriodReport,
}

/// Bootstrap at `ε = 1/2` with `B = A`; every `t` in the Bohr set then has
/// `|A ∩ (t + A)| ≥ |A|/2`, which is checked element by element.
pub fn bogolyubov_bohr(a: &GSet, seed: u64, config: &RegularityConfig) -> Result<BogolyubovBohr> {
    a.require_nonempty("Bogolyubov needs a non-empty set")?;
    let boot = bootstrap(a, &Rational::new(1, 2), seed, config)?;
    let realized = boot.spec.realize();
    let difference = quotient_set(a, a)?;
    let g = a.group();
    let offender = realized
        .to_vec()
        .into_par_iter()
        .filter(|&t| 2 * a.iter().filter(|&x| a.contains(g.op(x, g.inv(t)))).count() < a.len())
        .min();
    Ok(BogolyubovBohr {
        rank: boot.spec.rank(),
        size: realized.len(),
        in_difference_set: realized.is_subset(&difference),
        well_represented: offender.is_none(),
        offender,
        spec: boot.spec.clone(),
        bootstrap: boot,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BogolyubovMode {
    Dense,
    Doubling,
}

#[derive(Clone, Debug, Serialize)]
pub struct PullbackReport {
    /// Translate subtracted from `A` so that it contains 0.
    pub shift: Vec<usize>,
    pub embedding: ModelEmbedding,
    /// The dense-mode subspace found inside `φ(A) − φ(A)`.
    pub model_basis: Vec<Vec<usize>>,
    pub model_size: usize,
    /// `|A − A| = |φ(A) − φ(A)|`.
    pub difference_preserved: bool,
    /// `H = φ^{-1}(V) ∩ (A − A)` has `|H| = |V|`.
    pub bijective: bool,
    /// `H` is closed under addition.
    pub is_subspace: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BogolyubovSubspace {
    pub mode: BogolyubovMode,
    pub basis: Vec<Vec<usize>>,
    pub size: usize,
    pub codimension: u32,
    /// `log_p(|A − A| / |V|)`.
    pub difference_codimension: f64,
    pub difference_size: usize,
    /// `V ⊆ A − A`, checked element by element.
    pub contained: bool,
    pub bohr: BogolyubovBohr,
    pub pullback: Option<Box<PullbackReport>>,
}

fn dense_subspace(a: &GSet, seed: u64, config: &RegularityConfig) -> Result<(GSet, Vec<Element>, BogolyubovBohr)> {
    let g = a.group();
    let bohr = bogolyubov_bohr(a, seed, config)?;
    let basis = annihilator_basis(g, bohr.spec.freqs())?;
    // Γ^⊥ sits inside every Bohr set with frequencies Γ.
    let v = bohr.spec.annihilator();
    Ok((v, basis, bohr))
}

fn log_ratio(p: usize, num: usize, den: usize) -> f64 {
    ((num as f64) / (den as f64)).ln() / (p as f64).ln()
}

/// A subspace inside `A − A` for `A ⊂ F_p^n`. Dense mode works in place;
/// doubling mode first models a translate of `A` in a small `F_p^m` by a
/// Freiman 4-isomorphism and pulls the subspace found there back.
pub fn bogolyubov_subspace(a: &GSet, mode: BogolyubovMode, seed: u64, config: &RegularityConfig) -> Result<BogolyubovSubspace> {
    let g = a.group().clone();
    let (p, n) = g.require_vector_space()?;
    a.require_nonempty("Bogolyubov needs a non-empty set")?;
    let difference = quotient_set(a, a)?;
    match mode {
        BogolyubovMode::Dense => {
            let (v, basis, bohr) = dense_subspace(a, seed, config)?;
            Ok(BogolyubovSubspace {
                mode,
                codimension: n - basis.len() as u32,
                basis: basis.iter().map(|&b| coords_of(&g, b)).collect(),
                size: v.len(),
                difference_codimension: log_ratio(p, difference.len(), v.len()),
                difference_size: difference.len(),
                contained: v.is_subset(&difference),
                bohr,
                pullback: None,
            })
        }
        BogolyubovMode::Doubling => {
            let shift = a.first().expect("non-empty");
            let a0 = a.right_translate(g.inv(shift))?;
            let embedding = model_embed(&a0, 4, seed, DEFAULT_MAX_ATTEMPTS)?;
            let target = embedding.target.clone();
            let image = embedding.map.codomain().clone();
            let image_difference = quotient_set(&image, &image)?;
            let (v, model_basis, bohr) = dense_subspace(&image, seed, config)?;
            // A − A is unchanged by the translation.
            let pulled: Vec<Element> = difference
                .iter()
                .map(|x| Ok((x, embedding.project(&g, x)?)))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|&(_, y)| v.contains(y))
                .map(|(x, _)| x)
                .collect();
            let h = GSet::new(&g, pulled)?;
            let basis = crate::linalg::span_basis(&g, &h.to_vec())?;
            let is_subspace = is_subgroup(&h);
            let pullback = PullbackReport {
                shift: coords_of(&g, shift),
                model_basis: model_basis.iter().map(|&b| coords_of(&target, b)).collect(),
                model_size: v.len(),
                difference_preserved: difference.len() == image_difference.len(),
                bijective: h.len() == v.len(),
                is_subspace,
                embedding,
            };
            Ok(BogolyubovSubspace {
                mode,
                codimension: n - basis.len() as u32,
                basis: basis.iter().map(|&b| coords_of(&g, b)).collect(),
                size: h.len(),
                difference_codimension: log_ratio(p, difference.len(), h.len()),
                difference_size: difference.len(),
                contained: h.is_subset(&difference) && pullback.bijective,
                bohr,
                pullback: Some(Box::new(pullback)),
            })
        }
    }
}

/// The outcome of any Bogolyubov strategy.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum BogolyubovOutcome {
    Bohr(Box<BogolyubovBohr>),
    Subspace(Box<BogolyubovSubspace>),
}

impl BogolyubovOutcome {
    /// The verified inclusion in `A − A`.
    pub fn contained(&self) -> bool {
        match self {
            BogolyubovOutcome::Bohr(b) => b.in_difference_set && b.well_represented,
            BogolyubovOutcome::Subspace(s) => {
                s.contained && s.pullback.as_ref().is_none_or(|p| p.is_subspace && p.difference_preserved)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct BogolyubovQuery {
    pub a: GSet,
    pub seed: u64,
    pub config: RegularityConfig,
}

pub trait BogolyubovMethod: Named + Send + Sync {
    fn extract(&self, query: &BogolyubovQuery) -> Result<BogolyubovOutcome>;
}

pub struct BohrBogolyubov;
pub struct DenseSubspaceBogolyubov;
pub struct DoublingSubspaceBogolyubov;

impl Named for BohrBogolyubov {
    fn name(&self) -> &'static str {
        "bohr"
    }
}

impl BogolyubovMethod for BohrBogolyubov {
    fn extract(&self, q: &BogolyubovQuery) -> Result<BogolyubovOutcome> {
        bogolyubov_bohr(&q.a, q.seed, &q.config).map(|b| BogolyubovOutcome::Bohr(Box::new(b)))
    }
}

impl Named for DenseSubspaceBogolyubov {
    fn name(&self) -> &'static str {
        "subspace"
    }
}

impl BogolyubovMethod for DenseSubspaceBogolyubov {
    fn extract(&self, q: &BogolyubovQuery) -> Result<BogolyubovOutcome> {
        bogolyubov_subspace(&q.a, BogolyubovMode::Dense, q.seed, &q.config)
            .map(|s| BogolyubovOutcome::Subspace(Box::new(s)))
    }
}

impl Named for DoublingSubspaceBogolyubov {
    fn name(&self) -> &'static str {
        "doubling"
    }
}

impl BogolyubovMethod for DoublingSubspaceBogolyubov {
    fn extract(&self, q: &BogolyubovQuery) -> Result<BogolyubovOutcome> {
        bogolyubov_subspace(&q.a, BogolyubovMode::Doubling, q.seed, &q.config)
            .map(|s| BogolyubovOutcome::Subspace(Box::new(s)))
    }
}

pub fn bogolyubov_methods() -> &'static Registry<dyn BogolyubovMethod> {
    static REG: OnceLock<Registry<dyn BogolyubovMethod>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn BogolyubovMethod> = Registry::new("bogolyubov");
        r.register(Arc::new(BohrBogolyubov))
            .register(Arc::new(DenseSubspaceBogolyubov))
            .register(Arc::new(DoublingSubspaceBogolyubov));
        r
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coset_union(g: &Arc<Group>, sub: &GSet, reps: &[Element]) -> GSet {
        reps.iter()
            .fold(GSet::empty(g), |acc, &r| acc.union(&sub.left_translate(r).unwrap()).unwrap())
    }

    #[test]
    fn coset_union_is_reproduced_exactly() {
        let g = Group::vector_space(2, 7).unwrap();
        // Index-8 subgroup: first three coordinates zero.
        let sub = GSet::from_predicate(&g, |x| {
            let c = g.coords(x).unwrap();
            c[0] == 0 && c[1] == 0 && c[2] == 0
        });
        let reps: Vec<Element> = [[0, 0, 0], [1, 0, 0], [1, 1, 0]]
            .iter()
            .map(|c| g.from_coords(&[c[0], c[1], c[2], 0, 0, 0, 0]).unwrap())
            .collect();
        let a = coset_union(&g, &sub, &reps);
        let dec = regularity_subspace(&a, &Rational::new(1, 2), 7, &RegularityConfig::default()).unwrap();
        assert_eq!(dec.symdiff, 0);
        assert_eq!(dec.w, a);
        assert!(dec.checks.h_in_difference_set && dec.checks.w_subset_a_plus_h);
        assert!(dec.codimension.unwrap() <= 3);
        assert!(dec.coset_densities.unwrap().iter().all(|c| c.count == 0 || c.density == Rational::one()));
    }

    #[test]
    fn whole_group() {
        let g = Group::cyclic(30).unwrap();
        let a = GSet::full(&g);
        let dec = regularity_bohr(&a, &Rational::new(1, 4), &Rational::new(1, 2), 1, &RegularityConfig::default()).unwrap();
        assert_eq!(dec.symdiff, 0);
        assert!(dec.checks.a_prime_large && dec.checks.dilate_density);
    }

    #[test]
    fn progression_in_prime_cyclic() {
        let g = Group::cyclic(1009).unwrap();
        let a = GSet::new(&g, 0..120).unwrap();
        let dec = regularity_bohr(&a, &Rational::new(1, 2), &Rational::new(1, 2), 3, &RegularityConfig::default()).unwrap();
        assert!(dec.symdiff_ratio <= Rational::new(1, 2));
        assert!(dec.checks.w_subset_a_plus_h && dec.checks.h_in_difference_set && dec.checks.a_prime_subset_a);
    }

    #[test]
    fn bogolyubov_on_subgroup_and_singleton() {
        let g = Group::cyclic(40).unwrap();
        let sub = GSet::new(&g, (0..40).step_by(5)).unwrap();
        let b = bogolyubov_bohr(&sub, 2, &RegularityConfig::default()).unwrap();
        assert!(b.in_difference_set && b.well_represented);
        let zero = GSet::new(&g, [0]).unwrap();
        let b = bogolyubov_bohr(&zero, 2, &RegularityConfig::default()).unwrap();
        assert_eq!(b.size, 1);
    }

    #[test]
    fn subspace_modes_agree_on_inclusion() {
        let g = Group::vector_space(2, 8).unwrap();
        let sub = GSet::from_predicate(&g, |x| {
            let c = g.coords(x).unwrap();
            c[0] == 0 && c[1] == 0
        });
        let a = sub.left_translate(g.from_coords(&[1, 1, 0, 0, 0, 0, 0, 1]).unwrap()).unwrap();
        let dense = bogolyubov_subspace(&a, BogolyubovMode::Dense, 5, &RegularityConfig::default()).unwrap();
        assert!(dense.contained);
        assert!(dense.codimension <= 2);
        let doubling = bogolyubov_subspace(&a, BogolyubovMode::Doubling, 5, &RegularityConfig::default()).unwrap();
        assert!(doubling.contained);
        let pb = doubling.pullback.unwrap();
        assert!(pb.is_subspace && pb.difference_preserved && pb.bijective);
    }

    #[test]
    fn registries_resolve() {
        assert_eq!(regularity_methods().names(), vec!["bohr", "subspace"]);
        assert!(bogolyubov_methods().get("doubling").is_ok());
        assert!(bogolyubov_methods().get("nope").is_err());
    }
}
