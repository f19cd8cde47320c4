//! Exact rational helpers.
//!
//! All arithmetic in the crate runs on arbitrary-precision rationals. Text
//! forms accepted by [`parse_rational`]: integers (`"100"`), fractions
//! (`"1/103"`, `"-4/6"`), and finite decimals (`"-0.5"`, `"2.85"`), which
//! convert exactly. [`format_rational`] writes the reduced `p/q` form (just
//! `p` when the denominator is one).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses an exact rational. Returns `None` for anything that is not an
/// integer, a fraction with nonzero denominator, or a finite decimal.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num.trim())?;
        let den = parse_integer(den.trim())?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let (negative, whole) = match whole.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, whole.strip_prefix('+').unwrap_or(whole)),
        };
        if (whole.is_empty() && frac.is_empty())
            || !whole.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return None;
        }
        let digits = format!("{whole}{frac}");
        let mut num: BigInt = digits.parse().ok()?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Some(Rational::new(num, den));
    }
    parse_integer(s).map(Rational::from_integer)
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn is_nonnegative(q: &Rational) -> bool {
    !q.is_negative()
}
