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

//! Exact piecewise-linear and piecewise-constant functions on `[0,1]`.
//!
//! Continuous piecewise-linear functions ([`PlFunction`]) model eigenvalue
//! functions and elements of the affine function space; finite step functions
//! ([`StepFunction`]) model dimension functions and rank functions. Both are
//! kept in canonical form after every operation, so structural equality is
//! equality of functions.
//!
//! Between two consecutive breakpoints of a merged refinement, every function
//! here is affine on the open interval. All comparisons and extrema therefore
//! reduce to a finite scan over breakpoint values and one-sided limits.

mod compare;
mod pl;
mod step;

pub use compare::{
    inf_difference, le_pointwise, weighted_sup_norm, Comparison, Extremum, Location, Witness,
};
pub use pl::PlFunction;
pub use step::{Interval, LscVerdict, Piece, StepFunction, Weight};

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

/// Arbitrary-precision rational; every exact computation in the crate uses it.
pub type Rational = num_rational::BigRational;

/// Shorthand for the rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub(crate) fn half(a: &Rational, b: &Rational) -> Rational {
    (a + b) / int(2)
}

/// Parses `"a/b"`, `"a"`, or a plain decimal like `"0.25"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Schema(format!("cannot parse rational literal {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Schema(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            BigInt::from_str(whole).map_err(|_| bad())?
        };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let frac = BigInt::from_str(frac).map_err(|_| bad())?;
        let magnitude = Rational::from_integer(whole.abs()) + Rational::new(frac, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

pub(crate) fn check_unit(t: &Rational) -> Result<()> {
    if t.is_negative() || *t > Rational::one() {
        Err(Error::OutOfDomain(t.clone()))
    } else {
        Ok(())
    }
}

/// Sorted union of two sorted breakpoint lists.
pub(crate) fn merge_breaks(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x < y => {
                i += 1;
                x
            }
            (Some(x), Some(y)) if x > y => {
                j += 1;
                y
            }
            (Some(x), Some(_)) => {
                i += 1;
                j += 1;
                x
            }
            (Some(x), None) => {
                i += 1;
                x
            }
            (None, Some(y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next.clone());
    }
    out
}

/// A function on `[0,1]` that is affine on each open interval between
/// consecutive breakpoints.
///
/// `value_at`, `left_limit` and `right_limit` assume `t ∈ [0,1]`; callers
/// validate the domain first.
pub trait Piecewise {
    fn breakpoints(&self) -> &[Rational];
    fn value_at(&self, t: &Rational) -> Rational;
    /// Limit from below; only meaningful for `t > 0`.
    fn left_limit(&self, t: &Rational) -> Rational;
    /// Limit from above; only meaningful for `t < 1`.
    fn right_limit(&self, t: &Rational) -> Rational;

    fn eval(&self, t: &Rational) -> Result<Rational> {
        check_unit(t)?;
        Ok(self.value_at(t))
    }
}

/// Either kind of function, as accepted by the comparison operations and the
/// JSON layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Function {
    Pl(PlFunction),
    Step(StepFunction),
}

impl Piecewise for Function {
    fn breakpoints(&self) -> &[Rational] {
        match self {
            Function::Pl(f) => f.breakpoints(),
            Function::Step(f) => f.breakpoints(),
        }
    }
    fn value_at(&self, t: &Rational) -> Rational {
        match self {
            Function::Pl(f) => f.value_at(t),
            Function::Step(f) => f.value_at(t),
        }
    }
    fn left_limit(&self, t: &Rational) -> Rational {
        match self {
            Function::Pl(f) => f.left_limit(t),
            Function::Step(f) => f.left_limit(t),
        }
    }
    fn right_limit(&self, t: &Rational) -> Rational {
        match self {
            Function::Pl(f) => f.right_limit(t),
            Function::Step(f) => f.right_limit(t),
        }
    }
}
