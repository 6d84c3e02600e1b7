//! Exact rational coefficients.

use alloc::string::{String, ToString};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"` or `"p"`; whitespace around the parts is ignored.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::ParseRational(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => BigInt::from_str(s).map(Rational::from_integer).map_err(|_| err()),
    }
}

/// Canonical `"p/q"` form (always with a denominator, reduced, sign on `p`).
pub fn format(r: &Rational) -> String {
    let mut out = r.numer().to_string();
    out.push('/');
    out.push_str(&r.denom().to_string());
    out
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn is_one(r: &Rational) -> bool {
    r.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse(" -4 ").unwrap(), int(-4));
        assert_eq!(format(&ratio(-2, 4)), "-1/2");
        assert_eq!(format(&int(3)), "3/1");
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn conversion() {
        assert_eq!(to_f64(&ratio(3, 4)), 0.75);
    }
}
