//! Exact rational helpers. All partition-of-unity and packing arithmetic in
//! this crate is done with arbitrary-precision rationals; floats appear only
//! in growth-degree diagnostics.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

pub fn rat_usize(n: usize) -> BigRational {
    BigRational::from(BigInt::from(n))
}

pub fn zero() -> BigRational {
    BigRational::zero()
}

pub fn one() -> BigRational {
    BigRational::one()
}

/// Renders a rational in the canonical "p/q" form used by every serializer in
/// the crate ("p" alone when the denominator is 1).
pub fn render(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses "p/q" or a bare integer.
pub fn parse(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Argument(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Argument(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Argument(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// `#[serde(with = ...)]` adapter writing rationals in the canonical "p/q"
/// wire form.
pub mod serde_rat {
    use super::{parse, render};
    use num_rational::BigRational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// ⌈a/b⌉ for positive rationals, as a nonnegative integer.
pub fn ceil_to_u32(r: &BigRational) -> u32 {
    assert!(r.is_positive(), "ceil_to_u32 needs a positive rational");
    let c = r.ceil();
    c.numer().try_into().expect("ceiling fits in u32")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_round_trip() {
        for (n, d) in [(1i64, 2i64), (-3, 4), (7, 1), (0, 5)] {
            let r = rat(n, d);
            assert_eq!(parse(&render(&r)).unwrap(), r);
        }
    }

    #[test]
    fn ceil_examples() {
        assert_eq!(ceil_to_u32(&rat(3, 2)), 2);
        assert_eq!(ceil_to_u32(&rat(2, 1)), 2);
        assert_eq!(ceil_to_u32(&rat(5, 2)), 3);
    }
}
