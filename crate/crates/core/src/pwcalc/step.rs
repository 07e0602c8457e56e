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

use super::{check_unit, half, Piecewise, PlFunction, Rational};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A rational interval inside `[0,1]` with explicit endpoint flags.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "crate::serial::rational")]
    pub lo: Rational,
    #[serde(with = "crate::serial::rational")]
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: Rational, hi: Rational) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn open(lo: Rational, hi: Rational) -> Self {
        Interval {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn point(t: Rational) -> Self {
        Interval::closed(t.clone(), t)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, t: &Rational) -> bool {
        let above = if self.lo_closed { *t >= self.lo } else { *t > self.lo };
        let below = if self.hi_closed { *t <= self.hi } else { *t < self.hi };
        above && below
    }

    /// Open relative to `[0,1]`: closed ends only at 0 or 1.
    pub fn is_relatively_open(&self) -> bool {
        !self.is_empty()
            && (!self.lo_closed || self.lo.is_zero())
            && (!self.hi_closed || self.hi.is_one())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    #[serde(flatten)]
    pub interval: Interval,
    #[serde(with = "crate::serial::rational")]
    pub value: Rational,
}

/// Finite piecewise-constant function on `[0,1]`.
///
/// Stored as breakpoints `0 = x_0 < … < x_n = 1`, the value at each
/// breakpoint, and the value on each open gap `(x_k, x_{k+1})`. Point values
/// that differ from both neighbouring gaps play the role of degenerate pieces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StepFunction {
    breaks: Vec<Rational>,
    at: Vec<Rational>,
    gaps: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LscVerdict {
    pub lsc: bool,
    /// First breakpoint whose value exceeds a one-sided limit.
    pub witness: Option<Rational>,
}

/// Runs of equal values over the sequence `at[0], gaps[0], at[1], …, at[n]`.
enum Slot {
    Point(usize),
    Gap(usize),
}

impl StepFunction {
    /// `at` has one entry per breakpoint, `gaps` one per open gap.
    pub fn from_parts(
        breaks: Vec<Rational>,
        at: Vec<Rational>,
        gaps: Vec<Rational>,
    ) -> Result<Self> {
        if breaks.len() < 2 || !breaks[0].is_zero() || !breaks[breaks.len() - 1].is_one() {
            return Err(Error::Malformed(
                "step breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed(
                "step breakpoints must be strictly increasing".into(),
            ));
        }
        if at.len() != breaks.len() || gaps.len() + 1 != breaks.len() {
            return Err(Error::Malformed("step value counts do not match breakpoints".into()));
        }
        Ok(Self::canonical(breaks, at, gaps))
    }

    fn canonical(breaks: Vec<Rational>, at: Vec<Rational>, gaps: Vec<Rational>) -> Self {
        let n = breaks.len();
        let mut b = Vec::with_capacity(n);
        let mut a = Vec::with_capacity(n);
        let mut g: Vec<Rational> = Vec::with_capacity(n);
        let mut gaps = gaps.into_iter();
        for (k, (t, v)) in breaks.into_iter().zip(at).enumerate() {
            let next_gap = gaps.next();
            let interior = k > 0 && k + 1 < n;
            if interior && g.last() == Some(&v) && next_gap.as_ref() == Some(&v) {
                continue;
            }
            b.push(t);
            a.push(v);
            if let Some(gv) = next_gap {
                g.push(gv);
            }
        }
        StepFunction {
            breaks: b,
            at: a,
            gaps: g,
        }
    }

    pub fn constant(c: Rational) -> Self {
        StepFunction {
            breaks: vec![Rational::zero(), Rational::one()],
            at: vec![c.clone(), c.clone()],
            gaps: vec![c],
        }
    }

    /// Builds from a partition of `[0,1]` into pieces, in any order.
    pub fn from_pieces(mut pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Empty("step function needs at least one piece"));
        }
        pieces.sort_by(|p, q| {
            p.interval
                .lo
                .cmp(&q.interval.lo)
                .then(q.interval.lo_closed.cmp(&p.interval.lo_closed))
        });
        let mut breaks = vec![Rational::zero()];
        let mut at: Vec<Option<Rational>> = vec![None];
        let mut gaps = Vec::new();
        let mut need_closed = true;
        for p in pieces {
            let iv = &p.interval;
            if iv.is_empty() {
                return Err(Error::Malformed(format!("empty piece {iv}")));
            }
            let pos = breaks.last().expect("nonempty");
            if iv.lo != *pos || iv.lo_closed != need_closed {
                return Err(Error::Malformed(format!(
                    "pieces do not partition [0,1]: {iv} does not continue at {pos}"
                )));
            }
            if iv.lo == iv.hi {
                *at.last_mut().expect("nonempty") = Some(p.value);
                need_closed = false;
                continue;
            }
            if iv.hi > Rational::one() {
                return Err(Error::Malformed(format!("piece {iv} leaves [0,1]")));
            }
            if iv.lo_closed {
                *at.last_mut().expect("nonempty") = Some(p.value.clone());
            }
            gaps.push(p.value.clone());
            breaks.push(iv.hi.clone());
            at.push(iv.hi_closed.then(|| p.value.clone()));
            need_closed = !iv.hi_closed;
        }
        if !breaks.last().expect("nonempty").is_one() || need_closed {
            return Err(Error::Malformed("pieces do not cover [0,1]".into()));
        }
        let at = at
            .into_iter()
            .map(|v| v.ok_or_else(|| Error::Malformed("uncovered breakpoint".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(breaks, at, gaps)
    }

    /// Maximal pieces; adjacent non-degenerate pieces carry distinct values.
    pub fn pieces(&self) -> Vec<Piece> {
        let n = self.breaks.len();
        let mut slots = Vec::with_capacity(2 * n);
        for k in 0..n {
            slots.push(Slot::Point(k));
            if k + 1 < n {
                slots.push(Slot::Gap(k));
            }
        }
        let value = |s: &Slot| match *s {
            Slot::Point(k) => &self.at[k],
            Slot::Gap(k) => &self.gaps[k],
        };
        let mut out = Vec::new();
        let mut start = 0;
        for end in 1..=slots.len() {
            if end < slots.len() && value(&slots[end]) == value(&slots[start]) {
                continue;
            }
            let (lo, lo_closed) = match slots[start] {
                Slot::Point(k) => (self.breaks[k].clone(), true),
                Slot::Gap(k) => (self.breaks[k].clone(), false),
            };
            let (hi, hi_closed) = match slots[end - 1] {
                Slot::Point(k) => (self.breaks[k].clone(), true),
                Slot::Gap(k) => (self.breaks[k + 1].clone(), false),
            };
            out.push(Piece {
                interval: Interval {
                    lo,
                    hi,
                    lo_closed,
                    hi_closed,
                },
                value: value(&slots[start]).clone(),
            });
            start = end;
        }
        out
    }

    pub fn point_values(&self) -> &[Rational] {
        &self.at
    }

    pub fn gap_values(&self) -> &[Rational] {
        &self.gaps
    }

    pub fn values(&self) -> impl Iterator<Item = &Rational> {
        self.at.iter().chain(&self.gaps)
    }

    pub fn min_value(&self) -> &Rational {
        self.values().min().expect("nonempty")
    }

    pub fn max_value(&self) -> &Rational {
        self.values().max().expect("nonempty")
    }

    pub fn is_constant(&self) -> bool {
        self.values().all(|v| *v == self.at[0])
    }

    pub fn map_values(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self::canonical(
            self.breaks.clone(),
            self.at.iter().map(&f).collect(),
            self.gaps.iter().map(&f).collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map_values(|v| v * c)
    }

    pub fn add(&self, other: &StepFunction) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &StepFunction) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &StepFunction, op: impl Fn(Rational, Rational) -> Rational) -> Self {
        let breaks = super::merge_breaks(&self.breaks, &other.breaks);
        let at = breaks
            .iter()
            .map(|t| op(self.value_at(t), other.value_at(t)))
            .collect();
        let gaps = breaks
            .windows(2)
            .map(|w| {
                let m = half(&w[0], &w[1]);
                op(self.value_at(&m), other.value_at(&m))
            })
            .collect();
        Self::canonical(breaks, at, gaps)
    }

    /// Sum of a nonempty list.
    pub fn sum<'a>(fns: impl IntoIterator<Item = &'a StepFunction>) -> Result<Self> {
        let mut it = fns.into_iter();
        let first = it.next().ok_or(Error::Empty("sum of no step functions"))?;
        Ok(it.fold(first.clone(), |acc, f| acc.add(f)))
    }

    /// `self ∘ g` for `g` mapping into `[0,1]`. Exact: on each gap of the
    /// preimage refinement `g` is affine and avoids the breakpoints of
    /// `self`, so the composite is constant there.
    pub fn compose_pl(&self, g: &PlFunction) -> Result<Self> {
        g.check_into_unit()?;
        let breaks = PlFunction::preimage_refinement(g, &self.breaks);
        let at = breaks.iter().map(|t| self.value_at(&g.value_at(t))).collect();
        let gaps = breaks
            .windows(2)
            .map(|w| self.value_at(&g.value_at(&half(&w[0], &w[1]))))
            .collect();
        Self::from_parts(breaks, at, gaps)
    }

    /// Lower semicontinuity: no point value exceeds an adjacent one-sided limit.
    pub fn is_lsc(&self) -> LscVerdict {
        let n = self.breaks.len();
        let witness = (0..n).find(|&k| {
            (k > 0 && self.at[k] > self.gaps[k - 1]) || (k + 1 < n && self.at[k] > self.gaps[k])
        });
        LscVerdict {
            lsc: witness.is_none(),
            witness: witness.map(|k| self.breaks[k].clone()),
        }
    }

    /// Points where the function is not locally constant, in increasing order.
    pub fn discontinuities(&self) -> Vec<Rational> {
        let n = self.breaks.len();
        (0..n)
            .filter(|&k| {
                (k > 0 && self.at[k] != self.gaps[k - 1]) || (k + 1 < n && self.at[k] != self.gaps[k])
            })
            .map(|k| self.breaks[k].clone())
            .collect()
    }

    /// Infimum over a closed subinterval `[lo, hi]`; a step function attains it.
    pub fn min_on(&self, lo: &Rational, hi: &Rational) -> Result<Rational> {
        check_unit(lo)?;
        check_unit(hi)?;
        if lo > hi {
            return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
        }
        let mut best = self.value_at(lo).min(self.value_at(hi));
        for (k, t) in self.breaks.iter().enumerate() {
            if t > lo && t < hi {
                best = best.min(self.at[k].clone());
            }
        }
        for (k, w) in self.breaks.windows(2).enumerate() {
            if w[1] > *lo && w[0] < *hi {
                best = best.min(self.gaps[k].clone());
            }
        }
        Ok(best)
    }

    fn locate(&self, t: &Rational) -> std::result::Result<usize, usize> {
        self.breaks.binary_search(t)
    }
}

impl Piecewise for StepFunction {
    fn breakpoints(&self) -> &[Rational] {
        &self.breaks
    }

    fn value_at(&self, t: &Rational) -> Rational {
        match self.locate(t) {
            Ok(k) => self.at[k].clone(),
            Err(k) => self.gaps[k - 1].clone(),
        }
    }

    fn left_limit(&self, t: &Rational) -> Rational {
        match self.locate(t) {
            Ok(k) => self.gaps[k.max(1) - 1].clone(),
            Err(k) => self.gaps[k - 1].clone(),
        }
    }

    fn right_limit(&self, t: &Rational) -> Rational {
        match self.locate(t) {
            Ok(k) => self.gaps[k.min(self.gaps.len() - 1)].clone(),
            Err(k) => self.gaps[k - 1].clone(),
        }
    }
}

impl StepFunction {
    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        check_unit(t)?;
        Ok(self.value_at(t))
    }
}

/// Strictly positive step function: the rank function of a full projection,
/// used to normalise sup norms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight(StepFunction);

impl Weight {
    pub fn new(f: StepFunction) -> Result<Self> {
        if let Some(k) = f.at.iter().position(|v| !v.is_positive()) {
            return Err(Error::NonPositiveWeight(f.breaks[k].clone()));
        }
        if let Some(k) = f.gaps.iter().position(|v| !v.is_positive()) {
            return Err(Error::NonPositiveWeight(half(&f.breaks[k], &f.breaks[k + 1])));
        }
        Ok(Weight(f))
    }

    pub fn unit() -> Self {
        Weight(StepFunction::constant(Rational::one()))
    }

    pub fn constant(c: Rational) -> Result<Self> {
        Self::new(StepFunction::constant(c))
    }

    pub fn scaled(&self, kappa: &Rational) -> Result<Self> {
        Self::new(self.0.scale(kappa))
    }

    pub fn as_step(&self) -> &StepFunction {
        &self.0
    }

    pub fn into_step(self) -> StepFunction {
        self.0
    }
}

impl Piecewise for Weight {
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
