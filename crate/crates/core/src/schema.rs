//! Wire formats. Integers travel as decimal strings and rationals as
//! `"p"` or `"p/q"` strings, because values exceed 2^53. Every record
//! carries `schema_version`; field names are frozen per version (see
//! `docs/schema.md`).

use crate::{Int, Rat};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// A versioned wire record: `{"schema_version": 1, "record": ..., <body>}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Record<T> {
    pub schema_version: u32,
    pub record: String,
    #[serde(flatten)]
    pub body: T,
}

impl<T: Serialize> Record<T> {
    pub fn new(record: &str, body: T) -> Self {
        Record {
            schema_version: SCHEMA_VERSION,
            record: record.to_string(),
            body,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `"p"`, `"p/q"` or a terminating decimal such as `"2.5"`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let (n, d): (Int, Int) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
        return (d != 0).then(|| Rat::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 30 {
            return None;
        }
        let neg = whole.starts_with('-');
        let w: Int = if whole.is_empty() || whole == "-" {
            0
        } else {
            whole.parse().ok()?
        };
        let scale = 10i128.checked_pow(frac.len() as u32)?;
        let f: Int = frac.parse().ok()?;
        let mag = w.abs().checked_mul(scale)?.checked_add(f)?;
        return Some(Rat::new(if neg { -mag } else { mag }, scale));
    }
    s.parse::<Int>().ok().map(Rat::from_integer)
}

/// `serde(with = ...)` adapter: an integer (any width) as a decimal string.
pub mod dec {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};
    use std::fmt::Display;
    use std::str::FromStr;

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// `serde(with = ...)` adapter: a pair of [`Int`]s as two decimal strings.
pub mod dec_pair {
    use crate::Int;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &(Int, Int), s: S) -> Result<S::Ok, S::Error> {
        [v.0.to_string(), v.1.to_string()].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(Int, Int), D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        Ok((
            a.parse().map_err(D::Error::custom)?,
            b.parse().map_err(D::Error::custom)?,
        ))
    }
}

/// `serde(with = ...)` adapter: [`Rat`] as `"p"` or `"p/q"`.
pub mod rat {
    use crate::Rat;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::rat_to_string(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rat(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }
}
