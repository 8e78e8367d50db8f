//! Exact rational scalars and their textual forms.
//!
//! Integers print as `7`, non-integers as `p/q` in lowest terms. Parsing
//! accepts the same two forms; decimals (`-1.25`) are accepted either
//! always (Newick lengths) or only on explicit request (vector files).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn format(q: &Rational) -> String {
    q.to_string()
}

/// Parse `a` or `a/b` (b > 0). With `allow_decimal`, also `a.bcd`, scaled
/// exactly by a power of ten.
pub fn parse(text: &str, allow_decimal: bool) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidNumber(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num).ok_or_else(bad)?;
        let den = parse_int(den).ok_or_else(bad)?;
        if !den.is_positive() || den_has_sign(s) {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some(v) = parse_int(s) {
        return Ok(Rational::from_integer(v));
    }
    if allow_decimal {
        return parse_decimal(s).ok_or_else(bad);
    }
    Err(bad())
}

fn den_has_sign(s: &str) -> bool {
    s.split_once('/')
        .map(|(_, d)| d.trim_start().starts_with(['+', '-']))
        .unwrap_or(false)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, fraction) = body.split_once('.')?;
    if whole.is_empty() && fraction.is_empty() {
        return None;
    }
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(whole) || !all_digits(fraction) {
        return None;
    }
    let mantissa: BigInt = format!("{whole}{fraction}")
        .trim_start_matches('0')
        .parse()
        .unwrap_or_default();
    let scale = num_traits::pow(BigInt::from(10), fraction.len());
    let q = Rational::new(mantissa, scale);
    Some(if negative { -q } else { q })
}
