//! Fourier analysis on finite abelian groups.
//!
//! With `f̂(γ) = Σ_x f(x) conj(γ(x))` the inversion formula reads
//! `f = E_γ f̂(γ) γ`, convolution becomes a pointwise product, and
//! `E_γ |f̂(γ)|² = ‖f‖₂²`.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{DualElement, Group};
use crate::registry::{Named, Registry};
use crate::setcalc::{naive_convolve, ConvolutionBackend, CountFn};

/// Groups larger than this use the fast transform by default.
pub const FAST_TRANSFORM_CUTOFF: usize = 64;

/// Magnitude slack when deciding large-spectrum membership.
pub const SPECTRUM_TOLERANCE: f64 = 1e-9;

/// Largest cover size for which certification is attempted.
pub const MAX_COVER: usize = 40;

/// Exhaustive span enumeration is used while `3^|Λ|` stays below this.
pub const EXHAUSTIVE_SPAN_LIMIT: u64 = 10_000_000;

/// A forward/inverse Fourier transform on an abelian group.
pub trait Transform: Named + Send + Sync {
    fn forward(&self, group: &Group, f: &[Complex64]) -> Result<Vec<Complex64>>;
    fn inverse(&self, group: &Group, coeffs: &[Complex64]) -> Result<Vec<Complex64>>;
}

fn require_moduli(group: &Group, len: usize) -> Result<&[usize]> {
    let moduli = group.moduli().ok_or_else(|| {
        Error::Unsupported("Fourier transforms need an abelian group given by cyclic factors".into())
    })?;
    if len != group.order() {
        return Err(Error::InvalidArgument(format!(
            "function has {len} values for a group of order {}",
            group.order()
        )));
    }
    Ok(moduli)
}

/// Direct evaluation of the defining sum using exact character phases.
pub struct NaiveTransform;

impl NaiveTransform {
    fn run(group: &Group, f: &[Complex64], sign: f64) -> Result<Vec<Complex64>> {
        let moduli = require_moduli(group, f.len())?;
        let n = group.order();
        let exp = group.exponent();
        let twiddle: Vec<Complex64> = (0..exp)
            .map(|k| Complex64::from_polar(1.0, sign * std::f64::consts::TAU * k as f64 / exp as f64))
            .collect();
        let coords: Vec<Vec<usize>> = group.elements().map(|x| group.coords(x).unwrap()).collect();
        let weights: Vec<usize> = moduli.iter().map(|&m| exp / m).collect();
        Ok((0..n)
            .map(|gamma| {
                let g = &coords[gamma];
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, &fx) in f.iter().enumerate() {
                    let phase = coords[x]
                        .iter()
                        .zip(g)
                        .zip(&weights)
                        .fold(0usize, |p, ((&xi, &gi), &w)| (p + xi * gi % exp * w) % exp);
                    acc += fx * twiddle[phase];
                }
                acc
            })
            .collect())
    }
}

impl Named for NaiveTransform {
    fn name(&self) -> &'static str {
        "naive"
    }
}

impl Transform for NaiveTransform {
    fn forward(&self, group: &Group, f: &[Complex64]) -> Result<Vec<Complex64>> {
        Self::run(group, f, -1.0)
    }

    fn inverse(&self, group: &Group, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = group.order() as f64;
        Ok(Self::run(group, coeffs, 1.0)?.into_iter().map(|v| v / n).collect())
    }
}

/// Mixed-radix FFT applied along each cyclic factor.
pub struct FastTransform;

impl FastTransform {
    fn run(group: &Group, f: &[Complex64], inverse: bool) -> Result<Vec<Complex64>> {
        let moduli = require_moduli(group, f.len())?;
        let n = group.order();
        let mut data = f.to_vec();
        let mut planner = FftPlanner::<f64>::new();
        let mut stride = 1;
        for &m in moduli {
            let fft = if inverse {
                planner.plan_fft_inverse(m)
            } else {
                planner.plan_fft_forward(m)
            };
            let mut line = vec![Complex64::new(0.0, 0.0); m];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            let block = stride * m;
            for base in (0..n).step_by(block) {
                for offset in 0..stride {
                    let start = base + offset;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[start + k * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (k, v) in line.iter().enumerate() {
                        data[start + k * stride] = *v;
                    }
                }
            }
            stride = block;
        }
        if inverse {
            let scale = n as f64;
            data.iter_mut().for_each(|v| *v /= scale);
        }
        Ok(data)
    }
}

impl Named for FastTransform {
    fn name(&self) -> &'static str {
        "fast"
    }
}

impl Transform for FastTransform {
    fn forward(&self, group: &Group, f: &[Complex64]) -> Result<Vec<Complex64>> {
        Self::run(group, f, false)
    }

    fn inverse(&self, group: &Group, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        Self::run(group, coeffs, true)
    }
}

pub fn transforms() -> &'static Registry<dyn Transform> {
    static REG: OnceLock<Registry<dyn Transform>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut reg: Registry<dyn Transform> = Registry::new("transform");
        reg.register(Arc::new(NaiveTransform));
        reg.register(Arc::new(FastTransform));
        reg
    })
}

fn default_transform(group: &Group) -> &'static dyn Transform {
    if group.order() > FAST_TRANSFORM_CUTOFF {
        &FastTransform
    } else {
        &NaiveTransform
    }
}

pub fn dft(group: &Group, f: &[Complex64]) -> Result<Vec<Complex64>> {
    default_transform(group).forward(group, f)
}

pub fn inverse_dft(group: &Group, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    default_transform(group).inverse(group, coeffs)
}

pub fn dft_real(group: &Group, f: &[f64]) -> Result<Vec<Complex64>> {
    let f: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft(group, &f)
}

/// `|E_γ |f̂(γ)|² − ‖f‖₂²|`.
pub fn parseval_gap(group: &Group, f: &[Complex64]) -> Result<f64> {
    let coeffs = dft(group, f)?;
    let lhs = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / group.order() as f64;
    let rhs = f.iter().map(|c| c.norm_sqr()).sum::<f64>();
    Ok((lhs - rhs).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub threshold: f64,
    pub members: Vec<DualElement>,
    pub magnitudes: Vec<f64>,
}

/// Characters where `|f̂(γ)| ≥ θ`.
pub fn large_spectrum(group: &Group, f: &[f64], threshold: f64) -> Result<Spectrum> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidArgument("spectrum threshold must be positive".into()));
    }
    let coeffs = dft_real(group, f)?;
    let (members, magnitudes) = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() >= threshold - SPECTRUM_TOLERANCE)
        .map(|(g, c)| (g, c.norm()))
        .unzip();
    Ok(Spectrum {
        threshold,
        members,
        magnitudes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChangCover {
    /// The dissociated set Λ, in the order it was selected.
    pub basis: Vec<DualElement>,
    /// Every spectrum member was found in the {0,±1}-span of `basis`.
    pub certified: bool,
    /// `Some(true)` when dissociativity was verified by exhaustive enumeration.
    pub dissociated: Option<bool>,
    pub method: &'static str,
    pub diagnostic: Option<String>,
}

/// `S ∪ (S+γ) ∪ (S−γ)` over the dual group.
fn extend_span(group: &Group, span: &FixedBitSet, gamma: DualElement) -> FixedBitSet {
    let neg = group.inv(gamma);
    let mut next = span.clone();
    for s in span.ones() {
        next.insert(group.op(s, gamma));
        next.insert(group.op(s, neg));
    }
    next
}

/// Greedy maximal dissociated subset of the spectrum, in dual index order.
/// Maximality puts every spectrum member in the {0,±1}-span of the result.
pub fn chang_cover(group: &Group, spectrum: &Spectrum) -> Result<ChangCover> {
    group.moduli().ok_or_else(|| Error::Unsupported("Chang covers need an abelian group".into()))?;
    if spectrum.members.is_empty() {
        return Err(Error::InvalidArgument("Chang cover of an empty spectrum".into()));
    }
    let mut members = spectrum.members.clone();
    members.sort_unstable();
    let mut span = FixedBitSet::with_capacity(group.order());
    span.insert(group.dual_identity());
    let mut basis = Vec::new();
    for &gamma in &members {
        if !span.contains(gamma) {
            basis.push(gamma);
            if basis.len() > MAX_COVER {
                return Ok(ChangCover {
                    basis,
                    certified: false,
                    dissociated: None,
                    method: "none",
                    diagnostic: Some(format!(
                        "dissociated subset exceeds {MAX_COVER} characters; certification skipped"
                    )),
                });
            }
            span = extend_span(group, &span, gamma);
        }
    }

    let combos = 3u64.checked_pow(basis.len() as u32).unwrap_or(u64::MAX);
    if combos <= EXHAUSTIVE_SPAN_LIMIT {
        // Enumerate every coefficient vector in {0,1,-1}^m explicitly.
        let mut sums = vec![group.dual_identity()];
        for &lambda in &basis {
            let neg = group.inv(lambda);
            let mut next = Vec::with_capacity(sums.len() * 3);
            for &s in &sums {
                next.push(s);
                next.push(group.op(s, lambda));
                next.push(group.op(s, neg));
            }
            sums = next;
        }
        let zero_hits = sums.iter().filter(|&&s| s == group.dual_identity()).count();
        let reached: HashSet<DualElement> = sums.into_iter().collect();
        let missing = members.iter().find(|g| !reached.contains(g));
        Ok(ChangCover {
            certified: missing.is_none(),
            dissociated: Some(zero_hits == 1),
            method: "exhaustive",
            diagnostic: missing.map(|g| format!("character {g} not in the span")),
            basis,
        })
    } else {
        let mut closure = FixedBitSet::with_capacity(group.order());
        closure.insert(group.dual_identity());
        for &lambda in &basis {
            closure = extend_span(group, &closure, lambda);
        }
        let missing = members.iter().find(|&&g| !closure.contains(g));
        Ok(ChangCover {
            certified: missing.is_none(),
            dissociated: None,
            method: "subset-sum",
            diagnostic: missing.map(|g| format!("character {g} not in the span")),
            basis,
        })
    }
}

/// Convolution through the transform, rounded back to integers. Falls back
/// to direct summation when rounding cannot be trusted.
pub struct FourierConvolution;

/// Products of ℓ¹ norms above this are convolved directly.
const FLOAT_SAFE_MASS: f64 = (1u64 << 50) as f64;

impl Named for FourierConvolution {
    fn name(&self) -> &'static str {
        "fourier"
    }
}

impl ConvolutionBackend for FourierConvolution {
    fn convolve(&self, f: &CountFn, g: &CountFn) -> Result<CountFn> {
        f.group().same_group(g.group())?;
        let group = f.group();
        if group.moduli().is_none() {
            return naive_convolve(f, g);
        }
        let mass = |h: &CountFn| h.values().iter().map(|&v| (v as f64).abs()).sum::<f64>();
        if mass(f) * mass(g) > FLOAT_SAFE_MASS {
            return naive_convolve(f, g);
        }
        let to_c = |h: &CountFn| -> Vec<Complex64> {
            h.values().iter().map(|&v| Complex64::new(v as f64, 0.0)).collect()
        };
        let ff = dft(group, &to_c(f))?;
        let gg = dft(group, &to_c(g))?;
        let prod: Vec<Complex64> = ff.iter().zip(&gg).map(|(a, b)| a * b).collect();
        let back = inverse_dft(group, &prod)?;
        let mut values = Vec::with_capacity(back.len());
        for v in &back {
            let r = v.re.round();
            if (v.re - r).abs() >= 0.5 || v.im.abs() >= 0.5 {
                return naive_convolve(f, g);
            }
            values.push(r as i64);
        }
        let total: i128 = values.iter().map(|&v| v as i128).sum();
        if total != f.total() * g.total() {
            return naive_convolve(f, g);
        }
        let denominator = f
            .denominator()
            .checked_mul(g.denominator())
            .ok_or_else(|| Error::Overflow("convolution denominator".into()))?;
        CountFn::new(group, values, denominator)
    }
}
