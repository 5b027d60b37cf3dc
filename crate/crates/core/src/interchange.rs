//! Serde helpers shared by the JSON interchange formats.
//!
//! Rationals travel as strings (`"249/4"`, or `"31"` when integral) so no
//! tool ever sees a float. Integers are JSON numbers below 2^53 and strings
//! above, matching what IEEE-double based readers can hold exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const SAFE_INT_LIMIT: u64 = 1 << 53;

/// Canonical text form of a rational: `num/den` in lowest terms, or `num`
/// when the denominator is 1.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let parse_int = |t: &str| t.trim().parse::<BigInt>().map_err(|e| format!("bad rational {s:?}: {e}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d == BigInt::from(0) {
                return Err(format!("bad rational {s:?}: zero denominator"));
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntOrString {
    Int(i64),
    Str(String),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Str(String),
    Int(i64),
    Pair([IntOrString; 2]),
}

fn rat_from_repr(r: RatRepr) -> Result<BigRational, String> {
    match r {
        RatRepr::Str(s) => parse_rational(&s),
        RatRepr::Int(v) => Ok(BigRational::from_integer(v.into())),
        RatRepr::Pair([n, d]) => {
            let (n, d) = (big_from_repr(n)?, big_from_repr(d)?);
            if d == BigInt::from(0) {
                return Err("zero denominator".into());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// `BigRational` as `"num/den"`; reads strings, integers or `[num, den]`.
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        rat_from_repr(RatRepr::deserialize(d)?).map_err(D::Error::custom)
    }
}

pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<RatRepr>::deserialize(d)?
            .into_iter()
            .map(|r| rat_from_repr(r).map_err(D::Error::custom))
            .collect()
    }
}

pub mod rational_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(format_rational).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<RatRepr>::deserialize(d)?
            .map(|r| rat_from_repr(r).map_err(D::Error::custom))
            .transpose()
    }
}

/// `BigRational` as a `[num, den]` pair; reads the same forms as [`rational`].
pub mod rational_pair {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        [big_to_repr(r.numer()), big_to_repr(r.denom())].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        rational::deserialize(d)
    }
}

pub mod rational_pair_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[IntOrString; 2]> = v.iter().map(|r| [big_to_repr(r.numer()), big_to_repr(r.denom())]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        rational_vec::deserialize(d)
    }
}

fn big_to_repr(v: &BigInt) -> IntOrString {
    if v.abs() < BigInt::from(SAFE_INT_LIMIT) {
        IntOrString::Int(i64::try_from(v).expect("below 2^53"))
    } else {
        IntOrString::Str(v.to_string())
    }
}

fn big_from_repr(r: IntOrString) -> Result<BigInt, String> {
    match r {
        IntOrString::Int(v) => Ok(v.into()),
        IntOrString::Str(s) => s.trim().parse().map_err(|e| format!("bad integer {s:?}: {e}")),
    }
}

/// `BigInt` as a JSON number when exactly representable, else a string.
pub mod bigint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        big_to_repr(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        big_from_repr(IntOrString::deserialize(d)?).map_err(D::Error::custom)
    }
}

pub mod bigint_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(big_to_repr).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<IntOrString>::deserialize(d)?
            .map(big_from_repr)
            .transpose()
            .map_err(D::Error::custom)
    }
}

/// `u64` sequences with the same number-or-string rule.
pub mod u64_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[u64], s: S) -> Result<S::Ok, S::Error> {
        let items: Vec<IntOrString> = v
            .iter()
            .map(|&x| {
                if x < SAFE_INT_LIMIT {
                    IntOrString::Int(x as i64)
                } else {
                    IntOrString::Str(x.to_string())
                }
            })
            .collect();
        items.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
        Vec::<IntOrString>::deserialize(d)?
            .into_iter()
            .map(|r| {
                let v = big_from_repr(r).map_err(D::Error::custom)?;
                u64::try_from(&v).map_err(|_| D::Error::custom(format!("{v} is not a u64")))
            })
            .collect()
    }
}
