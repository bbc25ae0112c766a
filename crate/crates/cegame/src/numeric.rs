//! Exact rational scalars and decimal string conversion.
//!
//! All quantities, prices and payoffs in this crate are arbitrary-precision
//! rationals. Decimal strings ("58.125") convert to rationals with a
//! power-of-ten denominator, so instance files round-trip bit-exactly.
//! Rounding happens only at display time.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// The scalar type used throughout the crate.
pub type Rational = BigRational;

/// Shorthand for `num/den` with machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer-valued rational.
pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseNumberError {
    #[error("empty number literal")]
    Empty,
    #[error("invalid number literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses a decimal string ("21", "-3.5", "58.125") or a fraction string
/// ("19942/2197") into an exact rational.
pub fn parse_decimal(text: &str) -> Result<Rational, ParseNumberError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseNumberError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_plain_decimal(num.trim())
            .ok_or_else(|| ParseNumberError::Invalid(text.to_string()))?;
        let d = parse_plain_decimal(den.trim())
            .ok_or_else(|| ParseNumberError::Invalid(text.to_string()))?;
        if d.is_zero() {
            return Err(ParseNumberError::ZeroDenominator(text.to_string()));
        }
        return Ok(n / d);
    }
    parse_plain_decimal(s).ok_or_else(|| ParseNumberError::Invalid(text.to_string()))
}

fn parse_plain_decimal(s: &str) -> Option<Rational> {
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    if digits.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let mut numerator: BigInt = if int_part.is_empty() {
        BigInt::zero()
    } else {
        int_part.parse().ok()?
    };
    let scale = BigInt::from(10u8).pow(frac_part.len() as u32);
    numerator *= &scale;
    if !frac_part.is_empty() {
        numerator += frac_part.parse::<BigInt>().ok()?;
    }
    Some(Rational::new(BigInt::from(sign) * numerator, scale))
}

/// Fixed-point rendering with `digits` decimal places, rounding half away
/// from zero. Presentation only; comparisons stay exact.
pub fn format_decimal(value: &Rational, digits: usize) -> String {
    let scale = BigInt::from(10u8).pow(digits as u32);
    let scaled = value * Rational::from_integer(scale.clone());
    // round half away from zero: (2*num + sign*den) div (2*den), truncating
    let num = scaled.numer();
    let den = scaled.denom(); // > 0 after normalization
    let two = BigInt::from(2);
    let adjust = if num.is_negative() { -den } else { den.clone() };
    let rounded: BigInt = (num * &two + adjust) / (den * &two);
    let negative = rounded.is_negative();
    let mut mag = rounded.magnitude().to_string();
    if digits == 0 {
        return format!("{}{}", if negative { "-" } else { "" }, mag);
    }
    while mag.len() <= digits {
        mag.insert(0, '0');
    }
    let split = mag.len() - digits;
    format!(
        "{}{}.{}",
        if negative { "-" } else { "" },
        &mag[..split],
        &mag[split..]
    )
}

/// Minimal exact decimal rendering, available when the reduced denominator
/// has no prime factors besides 2 and 5. Returns `None` otherwise.
pub fn format_exact_decimal(value: &Rational) -> Option<String> {
    let den = value.denom();
    if den.is_one() {
        return Some(value.numer().to_string());
    }
    let mut rest = den.clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&rest % &two).is_zero() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scale = BigInt::from(10u8).pow(places) / den;
    let scaled = value.numer() * scale;
    let negative = scaled.is_negative();
    let mut mag = scaled.magnitude().to_string();
    while mag.len() <= places as usize {
        mag.insert(0, '0');
    }
    let split = mag.len() - places as usize;
    let mut out = format!(
        "{}{}.{}",
        if negative { "-" } else { "" },
        &mag[..split],
        &mag[split..]
    );
    while out.ends_with('0') {
        out.pop();
    }
    if out.ends_with('.') {
        out.pop();
    }
    Some(out)
}

/// Exact textual form: a finite decimal when one exists, otherwise `num/den`.
pub fn format_exact(value: &Rational) -> String {
    format_exact_decimal(value)
        .unwrap_or_else(|| format!("{}/{}", value.numer(), value.denom()))
}

/// Lossy conversion for interop layers.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
