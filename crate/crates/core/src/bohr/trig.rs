//! Exact comparison of chord lengths `|e^{2πi d/L} − 1| = 2 sin(π d / L)`
//! against rational radii.
//!
//! The only angles with rational cosine are multiples of π/3 and π/2, so
//! every other comparison is strict. Those are settled in floating point when
//! the gap is comfortable, and otherwise with fixed-point interval arithmetic
//! at increasing precision.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

const FLOAT_GUARD: f64 = 1e-9;
/// Error allowance for a fixed-point evaluation, in units of the last place.
const ULP_SLACK: u64 = 1 << 20;
const MAX_BITS: u64 = 1 << 15;

pub fn chord_f64(d: u64, l: u64) -> f64 {
    2.0 * (std::f64::consts::PI * d as f64 / l as f64).sin()
}

/// `cos(2π d / L)` when it is rational, as `(num, den)`.
fn rational_cos(d: u64, l: u64) -> Option<(i64, i64)> {
    if !(12 * d as u128).is_multiple_of(l as u128) {
        return None;
    }
    // angle = k·π/6 with k = 12d/L, reduced into [0, 12).
    let k = ((12 * d as u128) / l as u128 % 12) as u64;
    match k {
        0 => Some((1, 1)),
        2 | 10 => Some((1, 2)),
        3 | 9 => Some((0, 1)),
        4 | 8 => Some((-1, 2)),
        6 => Some((-1, 1)),
        _ => None,
    }
}

/// Orders `2 sin(π d / L)` (the distance of `e^{2πi d/L}` from 1) against `r ≥ 0`.
pub fn chord_cmp(d: u64, l: u64, r: &Rational) -> Ordering {
    assert!(l > 0 && !r.is_negative());
    let d = d % l;
    let d = d.min(l - d);
    if d == 0 {
        return if r.is_zero() { Ordering::Equal } else { Ordering::Less };
    }
    if let Some((cn, cd)) = rational_cos(d, l) {
        // chord² = 2 − 2cos = (2cd − 2cn)/cd, compared with num²/den².
        let (num, den) = (*r.numer() as i128, *r.denom() as i128);
        let lhs = (2 * cd as i128 - 2 * cn as i128) * den * den;
        let rhs = num * num * cd as i128;
        return lhs.cmp(&rhs);
    }
    let gap = chord_f64(d, l) - crate::rational::to_f64(r);
    if gap.abs() > FLOAT_GUARD {
        return if gap < 0.0 { Ordering::Less } else { Ordering::Greater };
    }
    precise_chord_cmp(d, l, r)
}

fn precise_chord_cmp(d: u64, l: u64, r: &Rational) -> Ordering {
    let mut bits = 128;
    while bits <= MAX_BITS {
        let s = sin_pi_fraction(d, l, bits);
        // Compare 2s with num/den: 2·den·S against num·2^bits.
        let den = BigInt::from(*r.denom());
        let lhs = BigInt::from(2) * &den * &s;
        let rhs = BigInt::from(*r.numer()) << bits;
        let err = BigInt::from(2) * den * BigInt::from(ULP_SLACK);
        let diff = lhs - rhs;
        if diff.abs() > err {
            return if diff.is_negative() { Ordering::Less } else { Ordering::Greater };
        }
        bits *= 2;
    }
    // Irrational against rational, so never equal; precision is exhausted only
    // for absurd radii.
    if chord_f64(d, l) < crate::rational::to_f64(r) {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// `atan(1/n)` scaled by `2^bits`, truncating each term.
fn atan_inv(n: u64, bits: u64) -> BigInt {
    let one = BigInt::one() << bits;
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut power = &one / &n;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    sum
}

/// π scaled by `2^bits`, within a few thousand units of the last place.
pub fn pi_fixed(bits: u64) -> BigInt {
    let guard = 32;
    let w = bits + guard;
    let pi = BigInt::from(16) * atan_inv(5, w) - BigInt::from(4) * atan_inv(239, w);
    pi >> guard
}

/// Rational bounds `lo < π < hi` with gap about `2^-bits`.
pub fn pi_bounds(bits: u64) -> (BigRational, BigRational) {
    let pi = pi_fixed(bits);
    let scale = BigInt::one() << bits;
    let slack = BigInt::from(ULP_SLACK);
    (
        BigRational::new(&pi - &slack, scale.clone()),
        BigRational::new(&pi + slack, scale),
    )
}

/// `sin(π d / L)` scaled by `2^bits`, for `0 ≤ d ≤ L/2`.
fn sin_pi_fraction(d: u64, l: u64, bits: u64) -> BigInt {
    let guard = 32;
    let w = bits + guard;
    let x = pi_fixed(w) * BigInt::from(d) / BigInt::from(l);
    let x2 = (&x * &x) >> w;
    let mut term = x.clone();
    let mut sum = x;
    let mut k = 1u64;
    while !term.is_zero() {
        term = -((&term * &x2) >> w) / BigInt::from((2 * k) * (2 * k + 1));
        sum += &term;
        k += 1;
    }
    sum >> guard
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn rational_angles_are_exact() {
        // d/L = 1/6: chord 1.
        assert_eq!(chord_cmp(1, 6, &Rational::from_integer(1)), Ordering::Equal);
        assert_eq!(chord_cmp(2, 12, &Rational::new(99, 100)), Ordering::Greater);
        // d/L = 1/2: chord 2.
        assert_eq!(chord_cmp(4, 8, &Rational::from_integer(2)), Ordering::Equal);
        // d/L = 1/4: chord √2.
        assert_eq!(chord_cmp(1, 4, &Rational::new(141421, 100000)), Ordering::Greater);
        assert_eq!(chord_cmp(1, 4, &Rational::new(141422, 100000)), Ordering::Less);
        assert_eq!(chord_cmp(0, 5, &Rational::from_integer(0)), Ordering::Equal);
    }

    #[test]
    fn near_ties_use_high_precision() {
        // 2 sin(π/7) = 0.867767478235116...
        let below = Rational::new(867767478235, 1_000_000_000_000);
        let above = Rational::new(867767478236, 1_000_000_000_000);
        assert_eq!(chord_cmp(1, 7, &below), Ordering::Greater);
        assert_eq!(chord_cmp(1, 7, &above), Ordering::Less);
        assert_eq!(precise_chord_cmp(1, 7, &below), Ordering::Greater);
        assert_eq!(precise_chord_cmp(1, 7, &above), Ordering::Less);
    }

    #[test]
    fn pi_digits() {
        let (lo, hi) = pi_bounds(200);
        let lo = lo.to_f64().unwrap();
        let hi = hi.to_f64().unwrap();
        assert!(lo <= std::f64::consts::PI && std::f64::consts::PI <= hi);
        assert!(hi - lo < 1e-40);
    }

    #[test]
    fn agrees_with_floating_point_away_from_ties() {
        for l in 1..60u64 {
            for d in 0..=l / 2 {
                for r in [Rational::new(1, 3), Rational::new(1, 2), Rational::new(5, 4)] {
                    let f = chord_f64(d, l) - crate::rational::to_f64(&r);
                    if f.abs() > 1e-6 {
                        let expected = if f < 0.0 { Ordering::Less } else { Ordering::Greater };
                        assert_eq!(chord_cmp(d, l, &r), expected, "d={d} l={l}");
                    }
                }
            }
        }
    }
}
