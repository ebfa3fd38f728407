//! Exact rational scalars.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical form (positive denominator, reduced).
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num/den`; panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"` or `"p"` (surrounding whitespace allowed).
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() || t.contains(char::is_whitespace) {
        return Err(Error::ParseRational(s.to_string()));
    }
    Rational::from_str(t).map_err(|_| Error::ParseRational(s.to_string()))
}

/// Canonical text form: `"p/q"`, or `"p"` when the denominator is one.
pub fn format(q: &Rational) -> String {
    q.to_string()
}

pub fn to_i64(q: &Rational) -> Option<i64> {
    if !q.is_integer() {
        return None;
    }
    i64::try_from(q.numer()).ok()
}

/// Largest absolute value among numerator and denominator, saturating at `u64::MAX`.
pub fn height(q: &Rational) -> u64 {
    let n = q.numer().abs();
    let d = q.denom().clone();
    let m = if n > d { n } else { d };
    u64::try_from(m).unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form() {
        let q = frac(6, -4);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(2));
        assert_eq!(format(&q), "-3/2");
        assert_eq!(format(&int(5)), "5");
    }

    #[test]
    fn parse_accepts_both_forms() {
        assert_eq!(parse("3/6").unwrap(), frac(1, 2));
        assert_eq!(parse(" -7 ").unwrap(), int(-7));
        assert_eq!(parse("4/1").unwrap(), int(4));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("1 /2").is_err());
        assert!(parse("").is_err());
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let q = frac(n, d);
            prop_assert_eq!(parse(&format(&q)).unwrap(), q);
        }
    }
}
