//! Instance files: a small TOML schema with exact numbers.
//!
//! Numbers are written as integers, quoted decimal strings ("58.125",
//! "68.5"), quoted fractions ("1/3"), or `{ num = ..., den = ... }`
//! tables. Bare floats are rejected — they would defeat exact parsing.
//!
//! ```toml
//! price = "5.5"
//! mqc = 11
//! under_penalty = 6
//! over_penalty = 0        # optional, default 0
//!
//! [[players]]
//! id = "1"
//! capacity = 5
//! fixed_cost = 20
//!
//! [weights]               # optional α per player id
//! "3" = "34"
//! ```

use crate::model::{CESituation, ModelError};
use crate::numeric::{format_exact, parse_decimal, Rational};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("instance file is not valid: {0}")]
    Parse(String),
    #[error("instance file is not valid: {0}")]
    Model(#[from] ModelError),
    #[error("weights mention unknown player `{0}`")]
    UnknownWeightPlayer(String),
}

/// A parsed instance: the situation plus optional α-weights (full-length,
/// zero where the file says nothing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub situation: CESituation,
    pub weights: Option<Vec<Rational>>,
}

/// An exact scalar as it appears in instance files.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Scalar(Rational);

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: Deserializer<'de>,
    {
        struct ScalarVisitor;

        impl<'de> Visitor<'de> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str(
                    "an integer, a quoted decimal/fraction string, or { num = ..., den = ... }",
                )
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
                Ok(Scalar(Rational::from_integer(BigInt::from(v))))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
                Ok(Scalar(Rational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, _: f64) -> Result<Scalar, E> {
                Err(E::custom(
                    "floats are not exact; quote the value as a string, e.g. \"58.125\"",
                ))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
                parse_decimal(v).map(Scalar).map_err(E::custom)
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Scalar, A::Error> {
                let mut num: Option<Scalar> = None;
                let mut den: Option<Scalar> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "num" => num = Some(map.next_value()?),
                        "den" => den = Some(map.next_value()?),
                        other => {
                            return Err(de::Error::custom(format!(
                                "unexpected key `{other}` in num/den pair"
                            )))
                        }
                    }
                }
                let num = num.ok_or_else(|| de::Error::custom("missing `num`"))?;
                let den = den.ok_or_else(|| de::Error::custom("missing `den`"))?;
                if den.0.is_zero() {
                    return Err(de::Error::custom("zero denominator"));
                }
                Ok(Scalar(num.0 / den.0))
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlayer {
    id: String,
    capacity: Scalar,
    fixed_cost: Scalar,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    players: Vec<RawPlayer>,
    price: Scalar,
    mqc: Scalar,
    under_penalty: Scalar,
    over_penalty: Option<Scalar>,
    weights: Option<BTreeMap<String, Scalar>>,
}

/// Parses an instance document, validating the schema and the model
/// invariants.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let raw: RawInstance =
        toml::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
    let mut players = Vec::with_capacity(raw.players.len());
    let mut capacity = Vec::with_capacity(raw.players.len());
    let mut fixed_cost = Vec::with_capacity(raw.players.len());
    for p in raw.players {
        players.push(p.id);
        capacity.push(p.capacity.0);
        fixed_cost.push(p.fixed_cost.0);
    }
    let situation = CESituation::new(
        players,
        capacity,
        fixed_cost,
        raw.price.0,
        raw.mqc.0,
        raw.under_penalty.0,
        raw.over_penalty.map_or_else(Rational::zero, |s| s.0),
    )?;
    let weights = match raw.weights {
        None => None,
        Some(map) => {
            let mut vec = vec![Rational::zero(); situation.n()];
            for (id, w) in map {
                let idx = situation
                    .player_index(&id)
                    .ok_or(InstanceError::UnknownWeightPlayer(id))?;
                vec[idx] = w.0;
            }
            Some(vec)
        }
    };
    Ok(Instance { situation, weights })
}

pub fn load_instance(path: &Path) -> Result<Instance, InstanceError> {
    let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

fn quote(value: &Rational) -> String {
    format!("\"{}\"", format_exact(value))
}

/// Serializes an instance; `parse_instance` recovers it exactly.
pub fn to_toml(instance: &Instance) -> String {
    let sit = &instance.situation;
    let mut out = String::new();
    out.push_str(&format!("price = {}\n", quote(sit.price())));
    out.push_str(&format!("mqc = {}\n", quote(sit.mqc())));
    out.push_str(&format!("under_penalty = {}\n", quote(sit.under_penalty())));
    out.push_str(&format!("over_penalty = {}\n", quote(sit.over_penalty())));
    for i in 0..sit.n() {
        out.push_str("\n[[players]]\n");
        out.push_str(&format!("id = {:?}\n", sit.players()[i]));
        out.push_str(&format!("capacity = {}\n", quote(sit.capacity(i))));
        out.push_str(&format!("fixed_cost = {}\n", quote(sit.fixed_cost(i))));
    }
    if let Some(weights) = &instance.weights {
        out.push_str("\n[weights]\n");
        for (i, w) in weights.iter().enumerate() {
            if !w.is_zero() {
                out.push_str(&format!("{:?} = {}\n", sit.players()[i], quote(w)));
            }
        }
    }
    out
}
