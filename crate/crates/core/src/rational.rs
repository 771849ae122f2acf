//! Exact rational helpers.

use std::str::FromStr;

use num::bigint::BigInt;
use num::{BigRational, Signed, ToPrimitive};

pub type Rational = BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"3"`, `"-2/5"` or a plain decimal such as `"0.75"` into an exact
/// rational.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if text.contains('/') || frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{whole_digits}{frac}");
        let mut numer = BigInt::from_str(&digits).ok()?;
        if negative {
            numer = -numer;
        }
        let denom = num::pow(BigInt::from(10), frac.len());
        return Some(Rational::new(numer, denom));
    }
    let value = Rational::from_str(text).ok()?;
    Some(value)
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn ceil_to_u64(value: &Rational) -> u64 {
    if value.is_negative() {
        return 0;
    }
    value.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

/// Smallest integer `t >= 0` with `t*t >= value`, i.e. the ceiling of the
/// square root, computed exactly.
pub fn ceil_sqrt(value: &Rational) -> u64 {
    if !value.is_positive() {
        return 0;
    }
    // floor(sqrt(ceil(value))) is within one of the answer.
    let upper = value.ceil().to_integer();
    let mut t = upper.sqrt().to_u64().unwrap_or(u64::MAX);
    while Rational::from_integer(BigInt::from(t) * BigInt::from(t)) < *value {
        t += 1;
    }
    while t > 0 && Rational::from_integer(BigInt::from(t - 1) * BigInt::from(t - 1)) >= *value {
        t -= 1;
    }
    t
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
