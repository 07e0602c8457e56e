// Copyright 2026 The ctrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! JSON encoding shared by every module.
//!
//! Rationals are `[numerator, denominator]` pairs, reduced, with a positive
//! denominator. Components that do not fit in an `i64` are written as
//! decimal strings. Extended rationals use the string `"inf"` for `+∞`.

use crate::pwcalc::{Function, Piece, PlFunction, StepFunction, Weight};
use crate::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    fn from_bigint(n: &BigInt) -> Self {
        match n.to_i64() {
            Some(v) => IntRepr::Small(v),
            None => IntRepr::Big(n.to_string()),
        }
    }

    fn into_bigint<E: de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Small(v) => Ok(BigInt::from(v)),
            IntRepr::Big(s) => s
                .parse()
                .map_err(|_| E::custom(format!("invalid integer {s:?}"))),
        }
    }
}

fn validated<E: de::Error>(n: BigInt, d: BigInt) -> Result<Rational, E> {
    if !d.is_positive() {
        return Err(E::custom(format!("denominator must be positive, got {d}")));
    }
    if !n.gcd(&d).is_one() {
        return Err(E::custom(format!("rational {n}/{d} is not reduced")));
    }
    Ok(Rational::new_raw(n, d))
}

/// `#[serde(with = "crate::serial::rational")]`
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        (IntRepr::from_bigint(q.numer()), IntRepr::from_bigint(q.denom())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let (n, den) = <(IntRepr, IntRepr)>::deserialize(d)?;
        validated(n.into_bigint()?, den.into_bigint()?)
    }
}

/// Newtype carrying the pair encoding, for use inside containers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rat(#[serde(with = "rational")] pub Rational);

/// `#[serde(with = "crate::serial::rational_vec")]`
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|q| Rat(q.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Ok(Vec::<Rat>::deserialize(d)?.into_iter().map(|r| r.0).collect())
    }
}

/// `#[serde(with = "crate::serial::rational_matrix")]`
pub mod rational_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            m.iter()
                .map(|row| row.iter().map(|q| Rat(q.clone())).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        Ok(Vec::<Vec<Rat>>::deserialize(d)?
            .into_iter()
            .map(|row| row.into_iter().map(|r| r.0).collect())
            .collect())
    }
}

/// `#[serde(with = "crate::serial::rational_opt")]`
pub mod rational_opt {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|q| Rat(q.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Ok(Option::<Rat>::deserialize(d)?.map(|r| r.0))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FunctionRepr {
    Pl { points: Vec<(Rat, Rat)> },
    Step { pieces: Vec<Piece> },
}

impl From<&PlFunction> for FunctionRepr {
    fn from(f: &PlFunction) -> Self {
        FunctionRepr::Pl {
            points: f
                .points()
                .map(|(t, v)| (Rat(t.clone()), Rat(v.clone())))
                .collect(),
        }
    }
}

impl From<&StepFunction> for FunctionRepr {
    fn from(f: &StepFunction) -> Self {
        FunctionRepr::Step {
            pieces: f.pieces(),
        }
    }
}

impl FunctionRepr {
    fn into_function<E: de::Error>(self) -> Result<Function, E> {
        match self {
            FunctionRepr::Pl { points } => {
                PlFunction::new(points.into_iter().map(|(t, v)| (t.0, v.0)).collect())
                    .map(Function::Pl)
                    .map_err(E::custom)
            }
            FunctionRepr::Step { pieces } => StepFunction::from_pieces(pieces)
                .map(Function::Step)
                .map_err(E::custom),
        }
    }
}

impl Serialize for PlFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FunctionRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match FunctionRepr::deserialize(d)?.into_function()? {
            Function::Pl(f) => Ok(f),
            Function::Step(_) => Err(de::Error::custom("expected kind \"pl\"")),
        }
    }
}

impl Serialize for StepFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FunctionRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match FunctionRepr::deserialize(d)?.into_function()? {
            Function::Step(f) => Ok(f),
            Function::Pl(_) => Err(de::Error::custom("expected kind \"step\"")),
        }
    }
}

impl Serialize for Function {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Function::Pl(f) => f.serialize(s),
            Function::Step(f) => f.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Function {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        FunctionRepr::deserialize(d)?.into_function()
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_step().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Weight::new(StepFunction::deserialize(d)?).map_err(de::Error::custom)
    }
}

pub fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("crate types always serialize")
}
