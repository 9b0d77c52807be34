//! Exact rational arithmetic.
//!
//! Every quantity in this crate is a [`Rational`]; nothing is ever rounded.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// Arbitrary-precision rational, always stored reduced with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Rational from a machine integer.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `p/q`. Panics if `q == 0`; test and fixture helper.
pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p"` or `"p/q"` where `p` is an integer and `q` a positive integer.
pub fn parse(s: &str) -> Result<Rational, Error> {
    let bad = || Error::InvalidRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        None => (s, None),
        Some((n, d)) => (n, Some(d)),
    };
    let numer: BigInt = num.parse().map_err(|_| bad())?;
    let denom: BigInt = match den {
        None => BigInt::one(),
        Some(d) => {
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if !d.is_positive() {
                return Err(bad());
            }
            d
        }
    };
    Ok(Rational::new(numer, denom))
}

/// Formats as `"p"` when integral, `"p/q"` otherwise.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sum of an iterator of rationals.
pub fn sum<'a>(iter: impl Iterator<Item = &'a Rational>) -> Rational {
    iter.fold(Rational::zero(), |acc, x| acc + x)
}
