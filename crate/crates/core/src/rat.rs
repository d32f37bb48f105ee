//! Exact rational scalars.
//!
//! `Rat` is an arbitrary-precision rational, always in lowest terms with a
//! positive denominator. Values serialize as `p/q`, or `p` when the
//! denominator is 1; any equivalent fraction is accepted on input.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

use crate::error::Error;

pub type Rat = num_rational::BigRational;

/// Integer as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `p/q` from machine integers. Panics on q = 0; use only with literal
/// denominators.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `p/q` or `p`. Rejects empty parts, zero denominators and any
/// non-integer garbage; accepts unreduced fractions and negative
/// denominators (normalized on construction).
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer = BigInt::from_str(num_str)
        .map_err(|_| Error::input(format!("invalid rational literal {s:?}")))?;
    let denom = match den_str {
        Some(d) => BigInt::from_str(d)
            .map_err(|_| Error::input(format!("invalid rational literal {s:?}")))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(Error::input(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(numer, denom))
}

/// Exact square root, if the value is a perfect square of a rational.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer().sqrt();
    let den = r.denom().sqrt();
    if &(&num * &num) == r.numer() && &(&den * &den) == r.denom() {
        Some(Rat::new(num, den))
    } else {
        None
    }
}
