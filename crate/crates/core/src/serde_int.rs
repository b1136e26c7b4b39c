//! `BigInt` as a JSON integer when it fits in `i64`, as a decimal string
//! otherwise.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    pub(crate) fn of(x: &BigInt) -> Self {
        match x.to_i64() {
            Some(v) => IntRepr::Small(v),
            None => IntRepr::Big(x.to_string()),
        }
    }

    pub(crate) fn into_bigint<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(v)),
            IntRepr::Big(s) => s.parse().map_err(E::custom),
        }
    }
}

pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    IntRepr::of(x).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    IntRepr::deserialize(d)?.into_bigint()
}
