//! Exact rational thresholds.
//!
//! Every ε, ρ, ν and τ in the toolkit is a [`Rational`]. Comparisons against
//! integer count functions multiply through by denominators so that no
//! decision depends on floating point rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse `{text}` as a rational"));
    if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(Error::InvalidArgument(format!("zero denominator in `{text}`")));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole_abs: i64 = whole.trim_start_matches(['-', '+']).parse().unwrap_or(0);
        let den = 10i64.pow(frac.len() as u32);
        let frac_num: i64 = frac.parse().map_err(|_| bad())?;
        let num = whole_abs
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_num))
            .ok_or_else(bad)?;
        return Ok(Rational::new(if negative { -num } else { num }, den));
    }
    let value: i64 = text.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(value))
}

pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A rational lower bound on `sqrt(r)` with absolute error below `2^-bits`.
pub fn sqrt_lower(r: &Rational, bits: u32) -> Rational {
    assert!(!r.is_negative(), "square root of a negative rational");
    if r.is_zero() {
        return Rational::zero();
    }
    // sqrt(n/d) = sqrt(n*d)/d; scale by 2^bits before taking the integer root.
    let bits = bits.min(30);
    let n = BigInt::from(*r.numer());
    let d = BigInt::from(*r.denom());
    let root = ((&n * &d) << (2 * bits)).sqrt();
    let den = d << bits;
    let g = root.gcd(&den);
    let (num, den) = (root / &g, den / &g);
    match (num.to_i64(), den.to_i64()) {
        (Some(num), Some(den)) => Rational::new(num, den),
        // Fall back to a coarser bound when the exact ratio does not fit.
        _ => sqrt_lower(r, bits.saturating_sub(4)),
    }
}

/// Smallest integer `>= r`.
pub fn ceil_to_u64(r: &Rational) -> u64 {
    let c = r.ceil();
    (*c.numer()).max(0) as u64
}

/// Serde adapter storing rationals as `"p/q"` strings.
pub mod as_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as a list of `"p/q"` strings.
pub mod vec_as_string {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(D::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_rational("1/4").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational(" 3 ").unwrap(), Rational::from_integer(3));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational::new(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn sqrt_lower_is_a_tight_lower_bound() {
        for (n, d) in [(1, 1), (1, 4), (2, 1), (3, 7), (999, 1000)] {
            let r = Rational::new(n, d);
            let s = sqrt_lower(&r, 20);
            let exact = (n as f64 / d as f64).sqrt();
            assert!(s * s <= r);
            assert!(exact - to_f64(&s) < 1e-5);
        }
        assert_eq!(sqrt_lower(&Rational::new(1, 4), 10), Rational::new(1, 2));
    }
}
