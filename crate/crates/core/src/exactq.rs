//! Exact rational helpers: square detection, exact square roots and the
//! `"p/q"` text form used by every serialized record.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

pub use num_bigint::BigInt as Integer;
pub use num_rational::BigRational;

use crate::error::{Error, Result};

/// Builds `num/den` in lowest terms. Panics on a zero denominator.
pub fn q(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `⌊√n⌋` for a non-negative integer.
pub fn integer_sqrt_floor(n: &BigInt) -> Result<BigInt> {
    if n.is_negative() {
        return Err(Error::domain(format!(
            "integer square root of negative {n}"
        )));
    }
    Ok(n.sqrt())
}

fn integer_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

pub fn is_perfect_square(value: &BigRational) -> bool {
    sqrt_if_square(value).is_some()
}

/// The non-negative square root, or `None` when `value` is not a square.
pub fn sqrt_if_square(value: &BigRational) -> Option<BigRational> {
    // BigRational is always reduced with a positive denominator, so the two
    // halves can be tested independently.
    let num = integer_sqrt_exact(value.numer())?;
    let den = integer_sqrt_exact(value.denom())?;
    Some(BigRational::new_raw(num, den))
}

/// The non-negative rational `r` with `r² = value`.
pub fn exact_sqrt(value: &BigRational) -> Result<BigRational> {
    sqrt_if_square(value).ok_or_else(|| Error::NotSquare(value.clone()))
}

/// Square-root that is expected to succeed; a failure is reported as an
/// internal-consistency error naming `what`.
pub(crate) fn sqrt_expected(value: &BigRational, what: &str) -> Result<BigRational> {
    sqrt_if_square(value)
        .ok_or_else(|| Error::internal(format!("{what} = {value} should be a rational square")))
}

/// Parses `"p/q"` or `"p"`. The result is reduced; a zero denominator is
/// rejected.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let parsed = match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim());
            let d = BigInt::from_str(d.trim());
            match (n, d) {
                (Ok(n), Ok(d)) if !d.is_zero() => Some(BigRational::new(n, d)),
                _ => None,
            }
        }
        None => BigInt::from_str(text).ok().map(BigRational::from_integer),
    };
    parsed.ok_or_else(|| Error::Parse(format!("expected a rational \"p/q\", got {text:?}")))
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(value: &BigRational) -> String {
    value.to_string()
}

pub(crate) fn sign_of(value: &BigRational) -> Sign {
    value.numer().sign()
}

pub(crate) fn is_excluded_parameter(value: &BigRational) -> bool {
    value.is_zero() || value.abs().is_one()
}

/// Serde adapter storing a rational as its `"p/q"` string.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigRational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(de)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}
