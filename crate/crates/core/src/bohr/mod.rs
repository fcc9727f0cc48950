//! Bohr sets `Bohr(Γ, ρ) = { x : |γ(x) − 1| ≤ ρ for all γ ∈ Γ }`.
//!
//! Every character takes values in the `L`-th roots of unity, `L` the
//! exponent of the group, so `|γ(x) − 1| = 2 sin(π d / L)` where `d` is the
//! distance of the phase numerator from zero. Membership of `x` therefore
//! depends only on `D(x) = max_γ d_γ(x)`, and a radius `r` corresponds to an
//! integer threshold on `D`. All set-valued answers below are exact.

pub mod trig;

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{DualElement, Element, Group};
use crate::rational::{self, Rational};
use crate::setcalc::{is_subgroup, GSet};

pub const DEFAULT_GRID_POINTS: usize = 48;
/// Finest grid tried by [`find_regular_dilate`] before giving up.
pub const MAX_DILATE_GRID: usize = 3072;
/// Regularity violations at or below this are floating point noise in the
/// jump positions, not genuine failures.
pub const DEFECT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BohrSpec {
    group: Arc<Group>,
    freqs: Vec<DualElement>,
    radius: Rational,
}

impl BohrSpec {
    /// Drops the dual identity and duplicates, and sorts the frequencies.
    pub fn new(group: &Arc<Group>, freqs: impl IntoIterator<Item = DualElement>, radius: Rational) -> Result<BohrSpec> {
        if !group.is_abelian() || group.moduli().is_none() {
            return Err(Error::Unsupported("Bohr sets need an abelian group".into()));
        }
        if radius.is_negative() {
            return Err(Error::InvalidArgument("Bohr radius must be non-negative".into()));
        }
        let mut freqs = freqs
            .into_iter()
            .map(|g| group.check(g))
            .collect::<Result<Vec<_>>>()?;
        freqs.retain(|&g| g != group.dual_identity());
        freqs.sort_unstable();
        freqs.dedup();
        Ok(BohrSpec {
            group: group.clone(),
            freqs,
            radius,
        })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn freqs(&self) -> &[DualElement] {
        &self.freqs
    }

    pub fn radius(&self) -> Rational {
        self.radius
    }

    pub fn rank(&self) -> usize {
        self.freqs.len()
    }

    pub fn with_radius(&self, radius: Rational) -> Result<BohrSpec> {
        if radius.is_negative() {
            return Err(Error::InvalidArgument("Bohr radius must be non-negative".into()));
        }
        Ok(BohrSpec {
            radius,
            ..self.clone()
        })
    }

    /// `B_τ = Bohr(Γ, τρ)`.
    pub fn dilate(&self, tau: Rational) -> Result<BohrSpec> {
        if tau.is_negative() {
            return Err(Error::InvalidArgument("dilation factor must be non-negative".into()));
        }
        self.with_radius(self.radius * tau)
    }

    pub fn realize(&self) -> GSet {
        BohrProfile::new(self).realize(&self.radius)
    }

    /// `Γ^⊥ = Bohr(Γ, 0)`.
    pub fn annihilator(&self) -> GSet {
        BohrProfile::new(self).realize(&Rational::zero())
    }
}

impl Serialize for BohrSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coords: Vec<Vec<usize>> = self
            .freqs
            .iter()
            .map(|&g| self.group.coords(g).unwrap_or_default())
            .collect();
        let mut st = s.serialize_struct("BohrSpec", 3)?;
        st.serialize_field("rank", &self.rank())?;
        st.serialize_field("freqs", &coords)?;
        st.serialize_field("radius", &rational::format_rational(&self.radius))?;
        st.end()
    }
}

/// The radius-independent part of a Bohr set: `D(x)` for every element and
/// the histogram of its values.
#[derive(Clone, Debug)]
pub struct BohrProfile {
    group: Arc<Group>,
    exponent: u64,
    rank: usize,
    distance: Vec<u64>,
    /// Distinct values of `D`, ascending, with cumulative counts.
    levels: Vec<u64>,
    cumulative: Vec<usize>,
}

impl BohrProfile {
    pub fn new(spec: &BohrSpec) -> BohrProfile {
        let g = &spec.group;
        let distance = spec
            .freqs
            .par_iter()
            .map(|&gamma| {
                g.char_phases(gamma)
                    .expect("frequencies were validated")
                    .into_iter()
                    .map(|p| p.distance_from_zero())
                    .collect::<Vec<u64>>()
            })
            .reduce(
                || vec![0; g.order()],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x = (*x).max(y);
                    }
                    a
                },
            );
        let mut sorted = distance.clone();
        sorted.sort_unstable();
        let mut levels = Vec::new();
        let mut cumulative = Vec::new();
        for (i, &d) in sorted.iter().enumerate() {
            if levels.last() == Some(&d) {
                *cumulative.last_mut().unwrap() = i + 1;
            } else {
                levels.push(d);
                cumulative.push(i + 1);
            }
        }
        BohrProfile {
            group: g.clone(),
            exponent: g.exponent() as u64,
            rank: spec.rank(),
            distance,
            levels,
            cumulative,
        }
    }

    /// Largest `d` with `2 sin(π d / L) ≤ r`.
    pub fn threshold(&self, r: &Rational) -> u64 {
        let l = self.exponent;
        let (mut lo, mut hi) = (0u64, l / 2);
        if trig::chord_cmp(hi, l, r) != Ordering::Greater {
            return hi;
        }
        // chord(lo) ≤ r < chord(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if trig::chord_cmp(mid, l, r) == Ordering::Greater {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    pub fn realize(&self, r: &Rational) -> GSet {
        let t = self.threshold(r);
        GSet::from_predicate(&self.group, |x| self.distance[x] <= t)
    }

    /// `|Bohr(Γ, r)|`.
    pub fn size(&self, r: &Rational) -> usize {
        self.count_upto(self.threshold(r))
    }

    fn count_upto(&self, t: u64) -> usize {
        match self.levels.partition_point(|&d| d <= t) {
            0 => 0,
            i => self.cumulative[i - 1],
        }
    }

    pub fn distances(&self) -> &[u64] {
        &self.distance
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubgroupReport {
    pub subgroup: GSet,
    pub index: usize,
    pub is_subgroup: bool,
    /// All moduli equal, so the group has uniform exponent `q`.
    pub uniform_exponent: bool,
    /// `q^rank`, saturating.
    pub index_bound: Option<u128>,
    /// `None` when the exponent is not uniform and the check is skipped.
    pub index_within_bound: Option<bool>,
}

pub fn subgroup_inside(spec: &BohrSpec) -> SubgroupReport {
    let h = spec.annihilator();
    let g = &spec.group;
    let moduli = g.moduli().expect("abelian");
    let uniform = moduli.windows(2).all(|w| w[0] == w[1]);
    let index = g.order() / h.len();
    let bound = uniform.then(|| {
        (g.exponent() as u128)
            .checked_pow(spec.rank() as u32)
            .unwrap_or(u128::MAX)
    });
    SubgroupReport {
        is_subgroup: is_subgroup(&h),
        index_within_bound: bound.map(|b| index as u128 <= b),
        index_bound: bound,
        uniform_exponent: uniform,
        index,
        subgroup: h,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeBoundReport {
    pub size: usize,
    /// `(2ρ/π)^d |G|`, for display.
    pub bound: f64,
    pub pass: bool,
    /// `(ρ/2π)^d |G|`, which follows from `|e^{iθ} − 1| ≤ |θ|` and the
    /// pigeonhole bound for arcs.
    pub arc_bound: f64,
    pub arc_pass: bool,
}

/// Compares `|B|` with `(2ρ/π)^d |G|` and with `(ρ/2π)^d |G|`, deciding with
/// rational bounds on π.
pub fn size_lower_bound_check(spec: &BohrSpec) -> Result<SizeBoundReport> {
    if spec.radius > Rational::one() {
        return Err(Error::InvalidArgument("the size bound needs radius at most 1".into()));
    }
    let size = spec.realize().len();
    let d = spec.rank() as i32;
    let order = spec.group.order() as f64;
    let rho = rational::to_f64(&spec.radius);
    let pi = std::f64::consts::PI;
    Ok(SizeBoundReport {
        size,
        bound: (2.0 * rho / pi).powi(d) * order,
        pass: exceeds_pi_bound(spec, size, 2, 1),
        arc_bound: (rho / (2.0 * pi)).powi(d) * order,
        arc_pass: exceeds_pi_bound(spec, size, 1, 2),
    })
}

/// Whether `size · (c·π)^d ≥ (a·ρ)^d · |G|`.
fn exceeds_pi_bound(spec: &BohrSpec, size: usize, a: i64, c: i64) -> bool {
    let d = spec.rank();
    let scaled = BigRational::new(
        BigInt::from(a) * BigInt::from(*spec.radius.numer()),
        BigInt::from(*spec.radius.denom()),
    );
    let rhs = num_traits::pow(scaled, d) * BigRational::from_integer(BigInt::from(spec.group.order()));
    let size_q = BigRational::from_integer(BigInt::from(size));
    if d == 0 || rhs.is_zero() {
        return size_q >= rhs;
    }
    let c = BigRational::from_integer(BigInt::from(c));
    let mut bits = 64;
    while bits <= 1 << 14 {
        let (lo, hi) = trig::pi_bounds(bits);
        if &size_q * num_traits::pow(&c * lo, d) >= rhs {
            return true;
        }
        if &size_q * num_traits::pow(&c * hi, d) < rhs {
            return false;
        }
        bits *= 2;
    }
    unreachable!("π is irrational, so the comparison is strict")
}

/// Largest violation of `1 − 12d|τ| ≤ |B_{1+τ}|/|B| ≤ 1 + 12d|τ|` over
/// `|τ| ≤ 1/12d`.
///
/// The size function `σ ↦ |B_σ|` is a right-continuous step function whose
/// jumps sit at `2 sin(π D / L)/ρ` for the values `D` taken by the profile.
/// Upper violations peak at jumps and lower ones just before them, so the
/// jumps together with the grid points and the window ends give the exact
/// supremum. Which elements sit inside the window is decided exactly; only
/// the violation magnitudes are floating point.
pub fn regularity_defect(spec: &BohrSpec, grid_points: usize) -> f64 {
    regularity_defect_with(&BohrProfile::new(spec), &spec.radius, grid_points)
}

fn regularity_defect_with(profile: &BohrProfile, rho: &Rational, grid_points: usize) -> f64 {
    let d = profile.rank;
    if d == 0 || rho.is_zero() {
        return 0.0;
    }
    let l = profile.exponent;
    let slope = 12.0 * d as f64;
    let width = Rational::new(1, 12 * d as i64);
    let base = profile.size(rho) as f64;
    let rho_f = rational::to_f64(rho);
    let upper_edge = *rho * (Rational::one() + width);
    let lower_edge = *rho * (Rational::one() - width);
    let mut worst: f64 = 0.0;
    for (i, &level) in profile.levels.iter().enumerate() {
        let inside_upper = trig::chord_cmp(level, l, &upper_edge) != Ordering::Greater;
        let above_rho = trig::chord_cmp(level, l, rho) == Ordering::Greater;
        let sigma = trig::chord_f64(level, l) / rho_f;
        if above_rho && inside_upper {
            let v = profile.cumulative[i] as f64 / base - 1.0 - slope * (sigma - 1.0);
            worst = worst.max(v);
        }
        let above_lower = trig::chord_cmp(level, l, &lower_edge) == Ordering::Greater;
        if !above_rho && above_lower {
            let before = if i == 0 { 0 } else { profile.cumulative[i - 1] };
            let v = 1.0 - slope * (1.0 - sigma) - before as f64 / base;
            worst = worst.max(v);
        }
    }
    if grid_points >= 2 {
        let steps = grid_points as i64 - 1;
        for j in 0..=steps {
            // τ from −1/12d to 1/12d.
            let tau = width * Rational::new(2 * j - steps, steps);
            let ratio = profile.size(&(*rho * (Rational::one() + tau))) as f64 / base;
            let allowance = slope * rational::to_f64(&tau).abs();
            worst = worst.max(ratio - 1.0 - allowance).max(1.0 - allowance - ratio);
        }
    }
    if worst <= DEFECT_TOLERANCE {
        0.0
    } else {
        worst
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularDilate {
    pub spec: BohrSpec,
    #[serde(with = "rational::as_string")]
    pub tau: Rational,
    pub defect: f64,
    /// Resolution of the grid on `[1/2, 1]` at which `tau` was found.
    pub grid: usize,
}

/// The largest `τ ∈ [1/2, 1]` on a grid for which `B_τ` is regular. The grid
/// starts at [`DEFAULT_GRID_POINTS`] and is doubled up to
/// [`MAX_DILATE_GRID`] when nothing passes.
pub fn find_regular_dilate(spec: &BohrSpec) -> Result<RegularDilate> {
    if spec.rank() == 0 || spec.radius.is_zero() {
        return Ok(RegularDilate {
            spec: spec.clone(),
            tau: Rational::one(),
            defect: 0.0,
            grid: 1,
        });
    }
    let profile = BohrProfile::new(spec);
    let mut profile_log = Vec::new();
    let mut grid = DEFAULT_GRID_POINTS;
    let mut first = true;
    while grid <= MAX_DILATE_GRID {
        // τ = 1 − j/(2·grid), j = 0..=grid; finer levels only add odd j.
        for j in 0..=grid as i64 {
            if !first && j % 2 == 0 {
                continue;
            }
            let tau = Rational::one() - Rational::new(j, 2 * grid as i64);
            let rho = spec.radius * tau;
            let defect = regularity_defect_with(&profile, &rho, DEFAULT_GRID_POINTS);
            if defect == 0.0 {
                return Ok(RegularDilate {
                    spec: spec.with_radius(rho)?,
                    tau,
                    defect,
                    grid,
                });
            }
            if first {
                profile_log.push(format!("{}:{defect:.3e}", rational::format_rational(&tau)));
            }
        }
        first = false;
        grid *= 2;
    }
    Err(Error::NoRegularDilate(format!(
        "no regular dilate on a grid of {MAX_DILATE_GRID} points; defects {}",
        profile_log.join(" ")
    )))
}

#[derive(Clone, Debug, Serialize)]
pub struct SmoothingReport {
    /// `Σ_x |μ_B(x + t) − μ_B(x)| = |B △ (B − t)| / |B|`.
    #[serde(with = "rational::as_string")]
    pub l1_shift: Rational,
    pub pass: bool,
}

pub fn smoothing_check(spec: &BohrSpec, t: Element, eps: &Rational) -> Result<SmoothingReport> {
    let b = spec.realize();
    let g = &spec.group;
    g.check(t)?;
    let shifted = b.left_translate(g.inv(t))?;
    let diff = b.symmetric_difference(&shifted)?.len();
    let l1 = Rational::new(diff as i64, b.len() as i64);
    Ok(SmoothingReport {
        pass: l1 <= *eps,
        l1_shift: l1,
    })
}
