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

use super::{half, merge_breaks, Piecewise, PlFunction, Rational, Weight};
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::cmp::Ordering;

/// Where an extremum is attained, or approached as a one-sided limit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    Point {
        #[serde(with = "crate::serial::rational")]
        t: Rational,
    },
    LimitFromLeft {
        #[serde(with = "crate::serial::rational")]
        t: Rational,
    },
    LimitFromRight {
        #[serde(with = "crate::serial::rational")]
        t: Rational,
    },
}

impl Location {
    pub fn t(&self) -> &Rational {
        match self {
            Location::Point { t } | Location::LimitFromLeft { t } | Location::LimitFromRight { t } => t,
        }
    }

    pub fn is_attained(&self) -> bool {
        matches!(self, Location::Point { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extremum {
    #[serde(with = "crate::serial::rational")]
    pub value: Rational,
    pub location: Location,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(with = "crate::serial::rational")]
    pub t: Rational,
    #[serde(with = "crate::serial::rational")]
    pub lhs: Rational,
    #[serde(with = "crate::serial::rational")]
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub holds: bool,
    /// First violating point scanning left to right.
    pub witness: Option<Witness>,
}

/// Scans the merged refinement of `f` and `g` left to right, calling `visit`
/// on each breakpoint and each open gap with the difference `g − f`.
fn scan<F, G, R>(f: &F, g: &G, mut visit: impl FnMut(Slot<'_>) -> Option<R>) -> Option<R>
where
    F: Piecewise + ?Sized,
    G: Piecewise + ?Sized,
{
    let breaks = merge_breaks(f.breakpoints(), g.breakpoints());
    for (k, x) in breaks.iter().enumerate() {
        let h = g.value_at(x) - f.value_at(x);
        if let Some(r) = visit(Slot::Point { x, h }) {
            return Some(r);
        }
        if let Some(y) = breaks.get(k + 1) {
            let hl = g.right_limit(x) - f.right_limit(x);
            let hr = g.left_limit(y) - f.left_limit(y);
            if let Some(r) = visit(Slot::Gap {
                a: x,
                b: y,
                hl,
                hr,
            }) {
                return Some(r);
            }
        }
    }
    None
}

enum Slot<'a> {
    Point {
        x: &'a Rational,
        h: Rational,
    },
    /// `h` is affine on `(a, b)` with one-sided limits `hl` at `a`, `hr` at `b`.
    Gap {
        a: &'a Rational,
        b: &'a Rational,
        hl: Rational,
        hr: Rational,
    },
}

/// A point of `(a, b)` where the affine function with end limits `hl`, `hr`
/// is negative, given that one of the limits is negative.
fn negative_point(a: &Rational, b: &Rational, hl: &Rational, hr: &Rational) -> Rational {
    let (neg_end, other, h_neg, h_other) = if hl.is_negative() {
        (a, b, hl, hr)
    } else {
        (b, a, hr, hl)
    };
    if !h_other.is_positive() {
        return half(a, b);
    }
    let zero = neg_end + (other - neg_end) * h_neg / (h_neg - h_other);
    half(neg_end, &zero)
}

/// Exact pointwise `f ≤ g` (or `f < g` when `strict`) on `[0,1]`.
pub fn le_pointwise<F, G>(f: &F, g: &G, strict: bool) -> Comparison
where
    F: Piecewise + ?Sized,
    G: Piecewise + ?Sized,
{
    let bad = |h: &Rational| h.is_negative() || (strict && h.is_zero());
    let witness = scan(f, g, |slot| match slot {
        Slot::Point { x, h } => bad(&h).then(|| x.clone()),
        Slot::Gap { a, b, hl, hr } => {
            if hl.is_negative() || hr.is_negative() {
                Some(negative_point(a, b, &hl, &hr))
            } else if strict && hl.is_zero() && hr.is_zero() {
                Some(half(a, b))
            } else {
                None
            }
        }
    });
    Comparison {
        holds: witness.is_none(),
        witness: witness.map(|t| Witness {
            lhs: f.value_at(&t),
            rhs: g.value_at(&t),
            t,
        }),
    }
}

fn better(candidate: &Rational, best: &Option<Extremum>, ord: Ordering) -> bool {
    match best {
        None => true,
        Some(e) => candidate.cmp(&e.value) == ord,
    }
}

fn better_attained(candidate: &Rational, best: &Option<Extremum>, ord: Ordering) -> bool {
    match best {
        Some(e) if *candidate == e.value => !e.location.is_attained(),
        _ => better(candidate, best, ord),
    }
}

/// Exact `inf_t (g(t) − f(t))` with its location. Attained values win ties
/// against one-sided limits; a difference constant on a gap is reported as
/// attained at the gap midpoint.
pub fn inf_difference<F, G>(g: &G, f: &F) -> Extremum
where
    F: Piecewise + ?Sized,
    G: Piecewise + ?Sized,
{
    let mut best: Option<Extremum> = None;
    scan(f, g, |slot| {
        match slot {
            Slot::Point { x, h } => {
                if better_attained(&h, &best, Ordering::Less) {
                    best = Some(Extremum {
                        value: h,
                        location: Location::Point { t: x.clone() },
                    });
                }
            }
            Slot::Gap { a, b, hl, hr } => {
                if hl == hr {
                    if better_attained(&hl, &best, Ordering::Less) {
                        best = Some(Extremum {
                            value: hl,
                            location: Location::Point { t: half(a, b) },
                        });
                    }
                } else {
                    let (v, location) = if hl < hr {
                        (hl, Location::LimitFromRight { t: a.clone() })
                    } else {
                        (hr, Location::LimitFromLeft { t: b.clone() })
                    };
                    if better(&v, &best, Ordering::Less) {
                        best = Some(Extremum { value: v, location });
                    }
                }
            }
        }
        None::<()>
    });
    best.expect("[0,1] has at least one breakpoint")
}

/// `sup_t |f(t)| / w(t)`, the norm of `f` normalised by the rank function `w`.
///
/// On each gap `|f|` is convex and `w` constant, so the supremum is a
/// breakpoint value or a one-sided limit at a breakpoint.
pub fn weighted_sup_norm(f: &PlFunction, w: &Weight) -> Extremum {
    let breaks = merge_breaks(f.breakpoints(), w.breakpoints());
    let mut best: Option<Extremum> = None;
    let offer = |v: Rational, location: Location, best: &mut Option<Extremum>| {
        if better(&v, best, Ordering::Greater) {
            *best = Some(Extremum { value: v, location });
        }
    };
    let last = breaks.len() - 1;
    for (k, x) in breaks.iter().enumerate() {
        let fx = f.value_at(x).abs();
        offer(&fx / w.value_at(x), Location::Point { t: x.clone() }, &mut best);
        if k > 0 {
            offer(
                &fx / w.left_limit(x),
                Location::LimitFromLeft { t: x.clone() },
                &mut best,
            );
        }
        if k < last {
            offer(
                &fx / w.right_limit(x),
                Location::LimitFromRight { t: x.clone() },
                &mut best,
            );
        }
    }
    best.expect("[0,1] has at least one breakpoint")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pwcalc::StepFunction;
    use crate::rat;

    fn dip() -> StepFunction {
        StepFunction::from_parts(
            vec![rat(0, 1), rat(1, 2), rat(1, 1)],
            vec![rat(2, 1), rat(1, 1), rat(2, 1)],
            vec![rat(2, 1), rat(2, 1)],
        )
        .unwrap()
    }

    /// f′ for the dip with δ = 1/8.
    fn dip_under() -> PlFunction {
        PlFunction::new(vec![
            (rat(0, 1), rat(2, 1)),
            (rat(3, 8), rat(2, 1)),
            (rat(1, 2), rat(1, 1)),
            (rat(5, 8), rat(2, 1)),
            (rat(1, 1), rat(2, 1)),
        ])
        .unwrap()
    }

    #[test]
    fn under_approximation_is_below_dimension_function() {
        assert!(le_pointwise(&dip_under(), &dip(), false).holds);
        let c = le_pointwise(&dip(), &dip_under(), false);
        assert!(!c.holds);
        let w = c.witness.unwrap();
        assert!(w.t > rat(3, 8) && w.t < rat(5, 8));
        assert!(w.lhs > w.rhs);
    }

    #[test]
    fn strict_comparison_of_equal_constants_fails() {
        let two = PlFunction::constant(rat(2, 1));
        let c = le_pointwise(&two, &two, true);
        assert!(!c.holds);
        assert_eq!(c.witness.unwrap().t, rat(0, 1));
        assert!(le_pointwise(&two, &two, false).holds);
    }

    #[test]
    fn open_gap_violation_found_near_endpoint() {
        // f rises from 0 to 4. Against g = 4 on [0,1) with g(1) = 3 the only
        // violation is the point 1; against g ≡ 3 it is the open gap (3/4, 1].
        let f = PlFunction::new(vec![(rat(0, 1), rat(0, 1)), (rat(1, 1), rat(4, 1))]).unwrap();
        let g = StepFunction::from_parts(
            vec![rat(0, 1), rat(1, 1)],
            vec![rat(4, 1), rat(3, 1)],
            vec![rat(4, 1)],
        )
        .unwrap();
        let c = le_pointwise(&f, &g, false);
        assert_eq!(c.witness.unwrap().t, rat(1, 1));
        let g2 = StepFunction::constant(rat(3, 1));
        let c2 = le_pointwise(&f, &g2, false);
        let w = c2.witness.unwrap();
        assert!(w.t > rat(3, 4) && w.t < rat(1, 1));
    }

    #[test]
    fn sup_norms() {
        let f = PlFunction::new(vec![(rat(0, 1), rat(-3, 1)), (rat(1, 1), rat(1, 1))]).unwrap();
        let n = weighted_sup_norm(&f, &Weight::unit());
        assert_eq!(n.value, rat(3, 1));
        assert_eq!(n.location, Location::Point { t: rat(0, 1) });
        let one = PlFunction::constant(rat(1, 1));
        let w2 = Weight::constant(rat(2, 1)).unwrap();
        assert_eq!(weighted_sup_norm(&one, &w2).value, rat(1, 2));
    }

    #[test]
    fn sup_norm_reports_unattained_limit() {
        // w = 2 on [0,1/2], 1 on (1/2,1]; f peaks at 1/2.
        let w = Weight::new(
            StepFunction::from_parts(
                vec![rat(0, 1), rat(1, 2), rat(1, 1)],
                vec![rat(2, 1), rat(2, 1), rat(1, 1)],
                vec![rat(2, 1), rat(1, 1)],
            )
            .unwrap(),
        )
        .unwrap();
        let f = PlFunction::new(vec![
            (rat(0, 1), rat(0, 1)),
            (rat(1, 2), rat(1, 1)),
            (rat(1, 1), rat(0, 1)),
        ])
        .unwrap();
        let n = weighted_sup_norm(&f, &w);
        assert_eq!(n.value, rat(1, 1));
        assert_eq!(n.location, Location::LimitFromRight { t: rat(1, 2) });
        assert!(!n.location.is_attained());
    }

    #[test]
    fn infimum_of_difference() {
        let m = inf_difference(&StepFunction::constant(rat(11, 1)), &dip().scale(&rat(6, 1)));
        assert_eq!(m.value, rat(-1, 1));
        assert_eq!(m.location, Location::Point { t: rat(0, 1) });
        let m = inf_difference(&dip(), &PlFunction::identity());
        assert_eq!(m.value, rat(1, 2));
        assert_eq!(m.location, Location::Point { t: rat(1, 2) });
    }
}
