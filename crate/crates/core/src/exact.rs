//! Exact rational helpers.
//!
//! Choice probabilities are composed in exact arithmetic so that values such
//! as `0.4 + 1/4` come out as `13/20` rather than a nearby binary float.
//! Decimal inputs are mapped to rationals through their shortest round-trip
//! decimal representation, which recovers what a user typed in a data file.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{QdtError, Result};

/// Arbitrary-precision rational used for choice-set arithmetic.
pub type Exact = BigRational;

/// Parses a plain decimal literal (`-0.125`, `3`, `2.5e-3`) into an exact rational.
pub fn parse_decimal(text: &str) -> Option<Exact> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut all_digits = String::with_capacity(int_part.len() + frac_part.len());
    all_digits.push_str(int_part);
    all_digits.push_str(frac_part);
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        Exact::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Exact::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Converts a finite float to the rational equal to its shortest round-trip decimal.
///
/// `0.4_f64` becomes exactly `2/5`.
pub fn exact_from_f64(x: f64) -> Result<Exact> {
    if !x.is_finite() {
        return Err(QdtError::Domain(format!("non-finite value {x}")));
    }
    // Display for f64 prints the shortest decimal that round-trips, never in exponent form.
    parse_decimal(&format!("{x}"))
        .ok_or_else(|| QdtError::Domain(format!("cannot represent {x} as a decimal")))
}

pub fn exact_from_rational64(r: Rational64) -> Exact {
    Exact::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Nearest float to an exact value.
pub fn to_f64(x: &Exact) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn exact_sum<'a, I: IntoIterator<Item = &'a Exact>>(values: I) -> Exact {
    values.into_iter().fold(Exact::zero(), |acc, v| acc + v)
}

/// Renders `num/den`, or just `num` for integers.
pub fn format_exact(x: &Exact) -> String {
    x.to_string()
}

/// Inverse of [`format_exact`].
pub fn parse_exact(text: &str) -> Option<Exact> {
    text.trim().parse::<Exact>().ok()
}
