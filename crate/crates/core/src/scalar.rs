//! Numeric backends for utilities.
//!
//! Every algorithm is generic over [`Scalar`], implemented for exact
//! [`Rational`] values and for `f64`. Exact mode is the default for
//! instances read from disk; the bandit learner works in `f64`.

use core::cmp::Ordering;
use core::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number.
pub type Rational = num_rational::BigRational;

/// A totally ordered field element usable as a utility value.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed {
    /// Converts an exact rational into this representation.
    fn from_rational(r: &Rational) -> Self;

    fn from_count(n: usize) -> Self;

    fn to_f64(&self) -> f64;

    /// Total order; `f64` values are assumed NaN-free.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_count(n: usize) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_count(n: usize) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }
}

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_f64(x)
}

/// Parses `"p/q"`, an integer, or a finite decimal literal (`"0.45"`,
/// `"-1.5e-2"`) into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::from_str_radix(num.trim(), 10).ok()?;
        let den = BigInt::from_str_radix(den.trim(), 10).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut digits = alloc::string::String::with_capacity(int_part.len() + frac_part.len());
    digits.push_str(int_part);
    digits.push_str(frac_part);
    let mut value = Rational::from_integer(BigInt::from_str_radix(&digits, 10).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    if negative {
        value = -value;
    }
    Some(value)
}

/// Renders an exact rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(r: &Rational) -> alloc::string::String {
    use alloc::string::ToString;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/4"), Some(ratio(1, 4)));
        assert_eq!(parse_rational(" 3 / 6 "), Some(ratio(1, 2)));
        assert_eq!(parse_rational("0.45"), Some(ratio(9, 20)));
        assert_eq!(parse_rational("1"), Some(int(1)));
        assert_eq!(parse_rational(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("2.5e-1"), Some(ratio(1, 4)));
        assert_eq!(parse_rational("-0.1"), Some(ratio(-1, 10)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn formats_rationals() {
        assert_eq!(format_rational(&ratio(3, 8)), "3/8");
        assert_eq!(format_rational(&int(1)), "1");
        assert_eq!(format_rational(&ratio(0, 5)), "0");
    }

    #[test]
    fn f64_total_order_handles_signed_zero() {
        assert_eq!(Scalar::total_cmp(&1.0f64, &0.5), Ordering::Greater);
        assert_eq!(<f64 as Scalar>::from_rational(&ratio(1, 4)), 0.25);
    }
}
