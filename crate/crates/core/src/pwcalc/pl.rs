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

use super::{check_unit, int, merge_breaks, Piecewise, Rational};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};

/// Continuous piecewise-linear function on `[0,1]` with rational breakpoints.
///
/// Breakpoints start at 0, end at 1 and increase strictly. Collinear interior
/// breakpoints are removed on construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlFunction {
    breaks: Vec<Rational>,
    values: Vec<Rational>,
}

fn lerp(a: &Rational, va: &Rational, b: &Rational, vb: &Rational, t: &Rational) -> Rational {
    va + (t - a) * (vb - va) / (b - a)
}

impl PlFunction {
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self> {
        let (breaks, values) = points.into_iter().unzip();
        Self::from_parts(breaks, values)
    }

    pub fn from_parts(breaks: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breaks.len() != values.len() {
            return Err(Error::Malformed(format!(
                "{} breakpoints but {} values",
                breaks.len(),
                values.len()
            )));
        }
        if breaks.len() < 2 {
            return Err(Error::Malformed("need at least the breakpoints 0 and 1".into()));
        }
        if !breaks[0].is_zero() || !breaks[breaks.len() - 1].is_one() {
            return Err(Error::Malformed("breakpoints must start at 0 and end at 1".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed("breakpoints must be strictly increasing".into()));
        }
        Ok(Self::canonical(breaks, values))
    }

    /// Drops interior breakpoints lying on the line through their neighbours.
    fn canonical(breaks: Vec<Rational>, values: Vec<Rational>) -> Self {
        let mut b: Vec<Rational> = Vec::with_capacity(breaks.len());
        let mut v: Vec<Rational> = Vec::with_capacity(values.len());
        for (t, y) in breaks.into_iter().zip(values) {
            while b.len() >= 2 {
                let n = b.len();
                let (t0, y0, t1, y1) = (&b[n - 2], &v[n - 2], &b[n - 1], &v[n - 1]);
                if (y1 - y0) * (&t - t0) == (&y - y0) * (t1 - t0) {
                    b.pop();
                    v.pop();
                } else {
                    break;
                }
            }
            b.push(t);
            v.push(y);
        }
        PlFunction {
            breaks: b,
            values: v,
        }
    }

    pub fn constant(c: Rational) -> Self {
        PlFunction {
            breaks: vec![Rational::zero(), Rational::one()],
            values: vec![c.clone(), c],
        }
    }

    pub fn identity() -> Self {
        PlFunction {
            breaks: vec![Rational::zero(), Rational::one()],
            values: vec![Rational::zero(), Rational::one()],
        }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn points(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.breaks.iter().zip(&self.values)
    }

    pub fn min_value(&self) -> &Rational {
        self.values.iter().min().expect("nonempty")
    }

    pub fn max_value(&self) -> &Rational {
        self.values.iter().max().expect("nonempty")
    }

    /// Checks that every value lies in `[0,1]`; extreme values of a
    /// piecewise-linear function sit at breakpoints.
    pub fn check_into_unit(&self) -> Result<()> {
        match self
            .points()
            .find(|(_, v)| v.is_negative() || **v > Rational::one())
        {
            Some((t, v)) => Err(Error::NotIntoUnit {
                t: t.clone(),
                value: v.clone(),
            }),
            None => Ok(()),
        }
    }

    pub fn maps_into_unit(&self) -> bool {
        self.check_into_unit().is_ok()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::canonical(
            self.breaks.clone(),
            self.values.iter().map(|v| v * c).collect(),
        )
    }

    pub fn add_constant(&self, c: &Rational) -> Self {
        PlFunction {
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    pub fn add(&self, other: &PlFunction) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PlFunction) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &PlFunction, op: impl Fn(Rational, Rational) -> Rational) -> Self {
        let breaks = merge_breaks(&self.breaks, &other.breaks);
        let values = breaks
            .iter()
            .map(|t| op(self.value_at(t), other.value_at(t)))
            .collect();
        Self::canonical(breaks, values)
    }

    /// Pointwise `Σ coeffs[i] · fns[i]` over the merged breakpoint set.
    pub fn linear_combine(coeffs: &[Rational], fns: &[PlFunction]) -> Result<Self> {
        if coeffs.is_empty() || fns.is_empty() {
            return Err(Error::Empty("linear combination needs at least one term"));
        }
        if coeffs.len() != fns.len() {
            return Err(Error::Malformed(format!(
                "{} coefficients for {} functions",
                coeffs.len(),
                fns.len()
            )));
        }
        let breaks = fns
            .iter()
            .skip(1)
            .fold(fns[0].breaks.clone(), |acc, f| merge_breaks(&acc, &f.breaks));
        let values = breaks
            .iter()
            .map(|t| {
                coeffs
                    .iter()
                    .zip(fns)
                    .fold(Rational::zero(), |acc, (c, f)| acc + c * f.value_at(t))
            })
            .collect();
        Ok(Self::canonical(breaks, values))
    }

    /// Breakpoints where `inner` is linear on each gap and never crosses a
    /// breakpoint of a function with breakpoints `outer`: the breakpoints of
    /// `inner` plus every preimage of an interior `outer` breakpoint.
    pub(crate) fn preimage_refinement(inner: &PlFunction, outer: &[Rational]) -> Vec<Rational> {
        let mut ts = Vec::with_capacity(inner.breaks.len() * 2);
        for k in 0..inner.breaks.len() - 1 {
            let (a, b) = (&inner.breaks[k], &inner.breaks[k + 1]);
            let (ga, gb) = (&inner.values[k], &inner.values[k + 1]);
            ts.push(a.clone());
            if ga == gb {
                continue;
            }
            let (lo, hi) = if ga < gb { (ga, gb) } else { (gb, ga) };
            let first = outer.partition_point(|x| x <= lo);
            let last = outer.partition_point(|x| x < hi);
            let mut seg: Vec<Rational> = outer[first..last]
                .iter()
                .map(|x| a + (x - ga) * (b - a) / (gb - ga))
                .collect();
            if ga > gb {
                seg.reverse();
            }
            ts.extend(seg);
        }
        ts.push(Rational::one());
        ts
    }

    /// `self ∘ inner`; `inner` must map into `[0,1]`.
    pub fn compose(&self, inner: &PlFunction) -> Result<Self> {
        inner.check_into_unit()?;
        let breaks = Self::preimage_refinement(inner, &self.breaks);
        let values = breaks
            .iter()
            .map(|t| self.value_at(&inner.value_at(t)))
            .collect();
        Ok(Self::canonical(breaks, values))
    }

    /// Index `k` of the segment `[breaks[k], breaks[k+1]]` that contains `t`,
    /// taking the left one at interior breakpoints.
    fn segment(&self, t: &Rational) -> usize {
        let k = self.breaks.partition_point(|x| x < t);
        k.saturating_sub(1).min(self.breaks.len() - 2)
    }
}

impl Piecewise for PlFunction {
    fn breakpoints(&self) -> &[Rational] {
        &self.breaks
    }

    fn value_at(&self, t: &Rational) -> Rational {
        let k = self.segment(t);
        let (a, b) = (&self.breaks[k], &self.breaks[k + 1]);
        if t == a {
            return self.values[k].clone();
        }
        if t == b {
            return self.values[k + 1].clone();
        }
        lerp(a, &self.values[k], b, &self.values[k + 1], t)
    }

    fn left_limit(&self, t: &Rational) -> Rational {
        self.value_at(t)
    }

    fn right_limit(&self, t: &Rational) -> Rational {
        self.value_at(t)
    }
}

impl PlFunction {
    /// Evaluates with a domain check.
    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        check_unit(t)?;
        Ok(self.value_at(t))
    }

    /// The ramp equal to 0 on `[0,lo]`, 1 on `[hi,1]`, linear between.
    pub fn ramp(lo: &Rational, hi: &Rational) -> Result<Self> {
        check_unit(lo)?;
        check_unit(hi)?;
        if lo >= hi {
            return Err(Error::InvalidParameter(format!("ramp needs {lo} < {hi}")));
        }
        let mut pts = Vec::with_capacity(4);
        if !lo.is_zero() {
            pts.push((Rational::zero(), Rational::zero()));
        }
        pts.push((lo.clone(), Rational::zero()));
        pts.push((hi.clone(), Rational::one()));
        if !hi.is_one() {
            pts.push((Rational::one(), Rational::one()));
        }
        Self::new(pts)
    }

    /// Lipschitz constant: largest absolute slope.
    pub fn lipschitz(&self) -> Rational {
        self.breaks
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| ((&v[1] - &v[0]) / (&t[1] - &t[0])).abs())
            .max()
            .unwrap_or_else(|| int(0))
    }
}
