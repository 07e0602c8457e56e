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

//! Dimension functions of special building blocks and the nested-open-set
//! presentation `d(t) = 1 + #{i : t ∈ A_i}`.

use crate::pwcalc::{int, le_pointwise, Interval, Piece, Piecewise, StepFunction};
use crate::{Error, Rational, Result};
use num_traits::{One, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// Finite, lower semicontinuous step function with positive integer values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DimensionFunction(StepFunction);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialVerdict {
    pub valid: bool,
    pub diagnostic: Option<String>,
    #[serde(with = "crate::serial::rational_opt")]
    pub witness: Option<Rational>,
}

/// Checks that `d` is the dimension function of a special building block.
pub fn validate_special(d: &StepFunction) -> SpecialVerdict {
    let fail = |msg: String, t: Rational| SpecialVerdict {
        valid: false,
        diagnostic: Some(msg),
        witness: Some(t),
    };
    for piece in d.pieces() {
        let t = piece.interval.lo.clone();
        let t = if piece.interval.lo_closed {
            t
        } else {
            crate::pwcalc::half(&piece.interval.lo, &piece.interval.hi)
        };
        if !piece.value.is_integer() {
            return fail(format!("value {} on {} is not an integer", piece.value, piece.interval), t);
        }
        if piece.value < Rational::one() {
            return fail(format!("value {} on {} is below 1", piece.value, piece.interval), t);
        }
    }
    let lsc = d.is_lsc();
    if let Some(t) = lsc.witness {
        return fail(format!("not lower semicontinuous at {t}"), t);
    }
    SpecialVerdict {
        valid: true,
        diagnostic: None,
        witness: None,
    }
}

impl DimensionFunction {
    pub fn new(d: StepFunction) -> Result<Self> {
        let v = validate_special(&d);
        if v.valid {
            Ok(DimensionFunction(d))
        } else if d.is_lsc().lsc {
            Err(Error::NotDimension(v.diagnostic.unwrap_or_default()))
        } else {
            Err(Error::NotLsc(v.witness.expect("failure carries a witness")))
        }
    }

    pub fn constant(n: u32) -> Result<Self> {
        Self::new(StepFunction::constant(int(n as i64)))
    }

    pub fn as_step(&self) -> &StepFunction {
        &self.0
    }

    pub fn into_step(self) -> StepFunction {
        self.0
    }

    pub fn max_dimension(&self) -> u32 {
        self.0
            .max_value()
            .to_integer()
            .to_u32()
            .expect("dimensions fit in u32")
    }

    /// Superlevel set `{t : d(t) ≥ level}` as an indicator function.
    fn superlevel(&self, level: &Rational) -> StepFunction {
        self.0.map_values(|v| if v >= level { Rational::one() } else { Rational::zero() })
    }
}

impl Piecewise for DimensionFunction {
    fn breakpoints(&self) -> &[Rational] {
        self.0.breakpoints()
    }
    fn value_at(&self, t: &Rational) -> Rational {
        self.0.value_at(t)
    }
    fn left_limit(&self, t: &Rational) -> Rational {
        self.0.left_limit(t)
    }
    fn right_limit(&self, t: &Rational) -> Rational {
        self.0.right_limit(t)
    }
}

impl Serialize for DimensionFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DimensionFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Self::new(StepFunction::deserialize(d)?).map_err(de::Error::custom)
    }
}

/// Finite union of intervals, open relative to `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenSet {
    indicator: StepFunction,
}

impl OpenSet {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        let mut indicator = StepFunction::constant(Rational::zero());
        for iv in &intervals {
            if !iv.is_relatively_open() {
                return Err(Error::Malformed(format!("{iv} is not open in [0,1]")));
            }
            if iv.lo < Rational::zero() || iv.hi > Rational::one() {
                return Err(Error::Malformed(format!("{iv} leaves [0,1]")));
            }
            indicator = indicator.add(&indicator_of(iv)?);
        }
        Ok(OpenSet {
            indicator: indicator.map_values(|v| {
                if v.is_zero() {
                    Rational::zero()
                } else {
                    Rational::one()
                }
            }),
        })
    }

    pub fn whole() -> Self {
        OpenSet {
            indicator: StepFunction::constant(Rational::one()),
        }
    }

    pub fn empty() -> Self {
        OpenSet {
            indicator: StepFunction::constant(Rational::zero()),
        }
    }

    fn from_indicator(indicator: StepFunction) -> Self {
        OpenSet { indicator }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        self.indicator.value_at(t).is_one()
    }

    pub fn is_subset_of(&self, other: &OpenSet) -> bool {
        le_pointwise(&self.indicator, &other.indicator, false).holds
    }

    pub fn indicator(&self) -> &StepFunction {
        &self.indicator
    }

    /// Maximal disjoint intervals, in increasing order.
    pub fn intervals(&self) -> Vec<Interval> {
        self.indicator
            .pieces()
            .into_iter()
            .filter(|p| p.value.is_one())
            .map(|p| p.interval)
            .collect()
    }
}

fn indicator_of(iv: &Interval) -> Result<StepFunction> {
    let zero = || Rational::zero();
    let mut pieces = Vec::new();
    if iv.lo > zero() || !iv.lo_closed {
        pieces.push(Piece {
            interval: Interval {
                lo: zero(),
                hi: iv.lo.clone(),
                lo_closed: true,
                hi_closed: !iv.lo_closed,
            },
            value: zero(),
        });
    }
    pieces.push(Piece {
        interval: iv.clone(),
        value: Rational::one(),
    });
    if iv.hi < Rational::one() || !iv.hi_closed {
        pieces.push(Piece {
            interval: Interval {
                lo: iv.hi.clone(),
                hi: Rational::one(),
                lo_closed: !iv.hi_closed,
                hi_closed: true,
            },
            value: zero(),
        });
    }
    StepFunction::from_pieces(pieces)
}

impl Serialize for OpenSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.intervals().serialize(s)
    }
}

impl<'de> Deserialize<'de> for OpenSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        OpenSet::new(Vec::<Interval>::deserialize(d)?).map_err(de::Error::custom)
    }
}

/// Matrix size `n` and nested open sets `A_1 ⊇ A_2 ⊇ … ⊇ A_{n−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedPresentation {
    pub n: u32,
    pub opens: Vec<OpenSet>,
}

impl NestedPresentation {
    pub fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("matrix size must be positive".into()));
        }
        if self.opens.len() + 1 != self.n as usize {
            return Err(Error::Malformed(format!(
                "n = {} needs {} open sets, got {}",
                self.n,
                self.n - 1,
                self.opens.len()
            )));
        }
        for (i, w) in self.opens.windows(2).enumerate() {
            let c = le_pointwise(w[1].indicator(), w[0].indicator(), false);
            if let Some(wit) = c.witness {
                return Err(Error::NotNested {
                    index: i + 2,
                    witness: wit.t,
                });
            }
        }
        Ok(())
    }
}

pub fn dim_from_nested(p: &NestedPresentation) -> Result<DimensionFunction> {
    p.check()?;
    let d = p
        .opens
        .iter()
        .fold(StepFunction::constant(Rational::one()), |acc, a| {
            acc.add(a.indicator())
        });
    DimensionFunction::new(d)
}

/// `A_i = {d ≥ i + 1}` for `i = 1..max(d) − 1`.
pub fn nested_from_dim(d: &DimensionFunction) -> NestedPresentation {
    let n = d.max_dimension();
    let opens = (1..n)
        .map(|i| OpenSet::from_indicator(d.superlevel(&int(i as i64 + 1))))
        .collect();
    NestedPresentation { n, opens }
}

/// Dimension function of the building block whose spectrum has a single
/// jump: 1 on `[0,t0]`, 2 on `(t0,1]`.
pub fn single_jump(t0: Rational) -> Result<DimensionFunction> {
    let parts = StepFunction::from_parts(
        vec![Rational::zero(), t0, Rational::one()],
        vec![int(1), int(1), int(2)],
        vec![int(1), int(2)],
    )?;
    DimensionFunction::new(parts)
}

/// Equal to `high` except for the single point `t0`, where it equals `low`.
pub fn point_dip(t0: Rational, high: u32, low: u32) -> Result<DimensionFunction> {
    let (hi, lo) = (int(high as i64), int(low as i64));
    let parts = StepFunction::from_parts(
        vec![Rational::zero(), t0, Rational::one()],
        vec![hi.clone(), lo, hi.clone()],
        vec![hi.clone(), hi],
    )?;
    DimensionFunction::new(parts)
}
