//! Exact rational scalars and their textual form.
//!
//! Every value that crosses a file boundary is written as a string, either an
//! integer (`"-3"`) or a reduced fraction (`"7/12"`), so that exactness
//! survives serialization.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number used for every moment, cumulant and coefficient.
pub type Scalar = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid rational literal {0:?}: expected an integer or \"p/q\" with q != 0")]
pub struct ParseScalarError(pub String);

/// Parses `"p/q"` or an integer literal. Surrounding whitespace is ignored.
pub fn parse(text: &str) -> Result<Scalar, ParseScalarError> {
    let err = || ParseScalarError(text.to_owned());
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

/// Canonical text: integers without a denominator, otherwise `p/q` reduced
/// with the sign on the numerator.
pub fn format(value: &Scalar) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn from_i64(v: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest binary64 value; saturates to +-inf for out-of-range magnitudes.
pub fn to_f64(value: &Scalar) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn factorial(n: usize) -> Scalar {
    (1..=n).fold(Scalar::one(), |acc, k| acc * from_i64(k as i64))
}

pub fn pow(base: &Scalar, exp: usize) -> Scalar {
    (0..exp).fold(Scalar::one(), |acc, _| acc * base)
}

/// serde adapter for `Scalar` fields stored as strings.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for `Vec<Scalar>` stored as an array of strings.
pub mod serde_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse("3").unwrap(), from_i64(3));
        assert_eq!(parse("-6/4").unwrap(), ratio(-3, 2));
        assert_eq!(parse(" 1 / 2 ").unwrap(), ratio(1, 2));
        assert_eq!(parse("2/-4").unwrap(), ratio(-1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "x", "1.5", "1/2/3"] {
            assert!(parse(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn format_is_canonical() {
        assert_eq!(format(&ratio(4, -8)), "-1/2");
        assert_eq!(format(&from_i64(0)), "0");
        assert_eq!(format(&ratio(10, 5)), "2");
    }

    #[test]
    fn text_roundtrip() {
        for (n, d) in [(1, 3), (-7, 12), (0, 5), (123456789, 1)] {
            let v = ratio(n, d);
            assert_eq!(parse(&format(&v)).unwrap(), v);
        }
    }
}
