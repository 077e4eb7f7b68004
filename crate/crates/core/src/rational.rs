//! Exact rational numbers and their canonical text form (`"p/q"` or `"n"`).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{text}`: expected an integer or `p/q` with q > 0")]
pub struct RationalParseError {
    pub text: String,
}

/// Parses `"3"`, `"-1"`, `"9/40"` or `"-2/4"`. Whitespace around the parts is
/// tolerated; decimals are rejected to keep values exact.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let err = || RationalParseError {
        text: text.to_string(),
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den <= BigInt::zero() {
        return Err(err());
    }
    Ok(Rational::new(num, den))
}

/// Canonical text: reduced fraction, integers without a denominator.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn from_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Display adaptor using [`format_rational`].
pub struct Exact<'a>(pub &'a Rational);

impl fmt::Display for Exact<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_canonicalizes() {
        assert_eq!(parse_rational("9/40").unwrap(), ratio(9, 40));
        assert_eq!(parse_rational("-2/4").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational(" 3 ").unwrap(), from_int(3));
        assert_eq!(format_rational(&ratio(4, 2)), "2");
        assert_eq!(format_rational(&ratio(-3, 6)), "-1/2");
    }

    #[test]
    fn rejects_bad_input() {
        for bad in ["0.9", "1/0", "1/-2", "", "a/b", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }
}
