//! Exact rational arithmetic and the canonical literal syntax shared by all
//! file formats.
//!
//! A rational literal is one of `123`, `-7/2`, or `12.50`; parsing a decimal
//! never goes through floating point. Canonical form is `n` for integers and
//! `n/d` otherwise, always reduced with a positive denominator.

use alloc::string::{String, ToString};
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational; the type of every budget, cost, payment,
/// satisfaction, and bound in this crate.
pub type Rational = num_rational::BigRational;

/// Shorthand for small rational constants.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand for small integer constants.
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Error raised when a rational literal cannot be parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError {
    literal: String,
}

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed rational literal {:?}", self.literal)
    }
}

#[cfg(test)]
impl std::error::Error for ParseRationalError {}

fn parse_bigint(text: &str) -> Option<BigInt> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Parses `123`, `-7/2`, or `12.50` into an exact rational.
pub fn parse_rational(literal: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError { literal: literal.to_string() };
    let (negative, body) = match literal.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, literal.strip_prefix('+').unwrap_or(literal)),
    };
    let magnitude = if let Some((numer, denom)) = body.split_once('/') {
        let numer = parse_bigint(numer).ok_or_else(err)?;
        let denom = parse_bigint(denom).ok_or_else(err)?;
        if denom.is_zero() {
            return Err(err());
        }
        Rational::new(numer, denom)
    } else if let Some((whole, frac)) = body.split_once('.') {
        let whole = parse_bigint(whole).ok_or_else(err)?;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let scale = BigInt::from(10u8).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().map_err(|_| err())?;
        Rational::new(whole * &scale + frac, scale)
    } else {
        Rational::from_integer(parse_bigint(body).ok_or_else(err)?)
    };
    Ok(if negative { -magnitude } else { magnitude })
}

/// Canonical literal: `n` when the denominator is one, `n/d` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        let mut out = value.numer().to_string();
        out.push('/');
        out.push_str(&value.denom().to_string());
        out
    }
}

/// Fixed-point decimal rendering, truncated toward zero to `places` digits.
pub fn format_decimal(value: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u8).pow(places);
    let scaled = (value.numer() * &scale) / value.denom();
    let sign = if scaled.is_negative() { "-" } else { "" };
    let digits = scaled.abs().to_string();
    let mut out = String::from(sign);
    let places = places as usize;
    if digits.len() > places {
        out.push_str(&digits[..digits.len() - places]);
    } else {
        out.push('0');
    }
    if places > 0 {
        out.push('.');
        for _ in digits.len()..places {
            out.push('0');
        }
        let frac_start = digits.len().saturating_sub(places);
        out.push_str(&digits[frac_start..]);
    }
    out
}
