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

//! Finite models of the range invariant: a simplex of traces with finitely
//! many extreme points, a lower semicontinuous affine trace-norm map on it
//! (possibly `+∞` at vertices), and a dimension group seen through a
//! rational pairing with the extreme states.

use crate::{Error, Rational, Result};
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A rational or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtRational {
    Finite(Rational),
    Infinite,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(q) => Some(q),
            ExtRational::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinite)
    }

    fn min_with(&self, c: &Rational) -> Rational {
        match self {
            ExtRational::Finite(q) => q.min(c).clone(),
            ExtRational::Infinite => c.clone(),
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(q: Rational) -> Self {
        ExtRational::Finite(q)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(q) => write!(f, "{q}"),
            ExtRational::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtRational::Finite(q) => crate::serial::rational::serialize(q, s),
            ExtRational::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Inf(String),
            Finite(crate::serial::Rat),
        }
        match Repr::deserialize(d)? {
            Repr::Inf(s) if s == "inf" => Ok(ExtRational::Infinite),
            Repr::Inf(s) => Err(de::Error::custom(format!("expected \"inf\", found {s:?}"))),
            Repr::Finite(q) => Ok(ExtRational::Finite(q.0)),
        }
    }
}

/// Base of the trace cone with `k` extreme points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexModel {
    pub k: usize,
}

impl SimplexModel {
    /// Checks a barycentric coordinate vector.
    pub fn check_point(&self, s: &[Rational]) -> Result<()> {
        if s.len() != self.k {
            return Err(Error::InvalidParameter(format!(
                "point has {} coordinates, simplex has {} vertices",
                s.len(),
                self.k
            )));
        }
        if let Some(q) = s.iter().find(|q| q.is_negative()) {
            return Err(Error::InvalidParameter(format!("negative barycentric coordinate {q}")));
        }
        let total: Rational = s.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!("coordinates sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn vertex(&self, i: usize) -> Vec<Rational> {
        (0..self.k)
            .map(|j| if i == j { Rational::one() } else { Rational::zero() })
            .collect()
    }
}

/// Affine map on the simplex given by its vertex values, all positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct TraceNormMap {
    vertex_values: Vec<ExtRational>,
}

impl TraceNormMap {
    pub fn new(vertex_values: Vec<ExtRational>) -> Result<Self> {
        if vertex_values.is_empty() {
            return Err(Error::Empty("trace norm map needs a vertex"));
        }
        if let Some(q) = vertex_values
            .iter()
            .filter_map(ExtRational::finite)
            .find(|q| !q.is_positive())
        {
            return Err(Error::InvalidParameter(format!("vertex value {q} is not positive")));
        }
        Ok(TraceNormMap { vertex_values })
    }

    pub fn vertex_values(&self) -> &[ExtRational] {
        &self.vertex_values
    }

    pub fn k(&self) -> usize {
        self.vertex_values.len()
    }
}

impl<'de> Deserialize<'de> for TraceNormMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        TraceNormMap::new(Vec::deserialize(d)?).map_err(de::Error::custom)
    }
}

/// `Σ s_i f(v_i)`, which is `+∞` as soon as an infinite vertex carries weight.
pub fn trace_norm_eval(f: &TraceNormMap, s: &[Rational]) -> Result<ExtRational> {
    SimplexModel { k: f.k() }.check_point(s)?;
    let mut total = Rational::zero();
    for (w, v) in s.iter().zip(&f.vertex_values) {
        if w.is_zero() {
            continue;
        }
        match v {
            ExtRational::Finite(q) => total += w * q,
            ExtRational::Infinite => return Ok(ExtRational::Infinite),
        }
    }
    Ok(ExtRational::Finite(total))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum GroupKind {
    /// Coefficients range over ℚ.
    #[serde(rename = "Q")]
    Rationals,
    /// Coefficients range over `q·ℤ`.
    #[serde(rename = "qZ")]
    ScaledIntegers {
        #[serde(with = "crate::serial::rational")]
        q: Rational,
    },
}

/// Group generated by `r` generators (with coefficients in ℚ or `q·ℤ`)
/// whose images under the `k` extreme states are the columns of `pairing`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupModel {
    #[serde(flatten)]
    pub kind: GroupKind,
    /// `pairing[j][l]` is the value of state `j` on generator `l`.
    #[serde(with = "crate::serial::rational_matrix")]
    pub pairing: Vec<Vec<Rational>>,
}

impl GroupModel {
    pub fn new(kind: GroupKind, pairing: Vec<Vec<Rational>>) -> Result<Self> {
        if let GroupKind::ScaledIntegers { q } = &kind {
            if !q.is_positive() {
                return Err(Error::InvalidParameter(format!("group scale {q} is not positive")));
            }
        }
        let r = pairing.first().map_or(0, Vec::len);
        if r == 0 || pairing.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidParameter("pairing must be a nonempty k×r matrix".into()));
        }
        if !has_positive_image(&pairing) {
            return Err(Error::InvalidParameter(
                "no group element is positive under every state".into(),
            ));
        }
        Ok(GroupModel { kind, pairing })
    }

    /// `ℚ` or `q·ℤ` embedded diagonally: every state takes value 1 on the generator.
    pub fn diagonal(kind: GroupKind, k: usize) -> Result<Self> {
        Self::new(kind, vec![vec![Rational::one()]; k])
    }

    pub fn k(&self) -> usize {
        self.pairing.len()
    }

    pub fn generators(&self) -> usize {
        self.pairing[0].len()
    }

    pub fn check_element(&self, x: &[Rational]) -> Result<()> {
        if x.len() != self.generators() {
            return Err(Error::InvalidParameter(format!(
                "element has {} coefficients, group has {} generators",
                x.len(),
                self.generators()
            )));
        }
        if let GroupKind::ScaledIntegers { q } = &self.kind {
            if let Some(c) = x.iter().find(|c| !(*c / q).is_integer()) {
                return Err(Error::InvalidParameter(format!("coefficient {c} is not in {q}·ℤ")));
            }
        }
        Ok(())
    }

    /// State values `v_j(x)` at every extreme state.
    pub fn states(&self, x: &[Rational]) -> Vec<Rational> {
        self.pairing
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, c)| a * c).sum())
            .collect()
    }
}

impl<'de> Deserialize<'de> for GroupModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            #[serde(flatten)]
            kind: GroupKind,
            #[serde(with = "crate::serial::rational_matrix")]
            pairing: Vec<Vec<Rational>>,
        }
        let r = Repr::deserialize(d)?;
        GroupModel::new(r.kind, r.pairing).map_err(de::Error::custom)
    }
}

/// Whether `P x > 0` componentwise for some rational `x`, by Fourier–Motzkin
/// elimination on the scaled system `P x ≥ 1`.
fn has_positive_image(p: &[Vec<Rational>]) -> bool {
    let r = p[0].len();
    let mut rows: Vec<(Vec<Rational>, Rational)> =
        p.iter().map(|a| (a.clone(), Rational::one())).collect();
    for l in 0..r {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for row in rows {
            match row.0[l].sign_of() {
                1 => pos.push(row),
                -1 => neg.push(row),
                _ => rest.push(row),
            }
        }
        for (a, b) in &pos {
            for (c, e) in &neg {
                let alpha = &a[l];
                let beta = -&c[l];
                let combined = a.iter().zip(c).map(|(x, y)| &beta * x + alpha * y).collect();
                rest.push((combined, &beta * b + alpha * e));
            }
        }
        rows = rest;
    }
    rows.iter().all(|(_, b)| !b.is_positive())
}

trait SignOf {
    fn sign_of(&self) -> i8;
}

impl SignOf for Rational {
    fn sign_of(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
}

fn rank(m: &[Vec<Rational>]) -> usize {
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in 0..a.len() {
            if i != rank && !a[i][c].is_zero() {
                let factor = &a[i][c] / &a[rank][c];
                let pivot = a[rank].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot) {
                    *x -= &factor * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn check_dims(g: &GroupModel, s: &SimplexModel, f: &TraceNormMap) -> Result<()> {
    if g.k() != s.k || f.k() != s.k {
        return Err(Error::InvalidParameter(format!(
            "simplex has {} vertices, pairing {} rows, trace norm map {} values",
            s.k,
            g.k(),
            f.k()
        )));
    }
    Ok(())
}

/// Wire form of a complete model:
/// `{"simplex":{"k":…},"f":[…],"group":{"kind":"Q"|"qZ","q":…},"pairing":[[…]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantModel {
    pub simplex: SimplexModel,
    pub f: TraceNormMap,
    pub group: GroupKind,
    #[serde(with = "crate::serial::rational_matrix")]
    pub pairing: Vec<Vec<Rational>>,
}

impl InvariantModel {
    /// Validates the pieces against each other.
    pub fn parts(&self) -> Result<(GroupModel, SimplexModel, TraceNormMap)> {
        let g = GroupModel::new(self.group.clone(), self.pairing.clone())?;
        check_dims(&g, &self.simplex, &self.f)?;
        Ok((g, self.simplex, self.f.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipVerdict {
    pub member: bool,
    /// Whether `x = 0` or `v(x) > 0` at every extreme state.
    pub positive: bool,
    #[serde(with = "crate::serial::rational_vec")]
    pub state_values: Vec<Rational>,
    /// First extreme state with `v(x) ≥ f(v)`.
    pub failing_vertex: Option<usize>,
}

/// `x ∈ D` iff `v(x) < f(v)` for every nonzero trace `v`. Both sides are
/// affine on the base, so it is enough to check extreme states. Unless
/// `literal`, `x` must also be zero or strictly positive.
pub fn dimension_range_membership(
    g: &GroupModel,
    s: &SimplexModel,
    f: &TraceNormMap,
    x: &[Rational],
    literal: bool,
) -> Result<MembershipVerdict> {
    check_dims(g, s, f)?;
    g.check_element(x)?;
    let state_values = g.states(x);
    let positive = x.iter().all(Zero::is_zero) || state_values.iter().all(Signed::is_positive);
    let failing_vertex = state_values
        .iter()
        .zip(&f.vertex_values)
        .position(|(v, fv)| fv.finite().is_some_and(|fv| v >= fv));
    Ok(MembershipVerdict {
        member: failing_vertex.is_none() && (literal || positive),
        positive,
        state_values,
        failing_vertex,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexSup {
    pub vertex: usize,
    pub sup: ExtRational,
    pub value: ExtRational,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AiVerdict {
    pub ai: bool,
    pub vertices: Vec<VertexSup>,
}

/// Compares `f(v)` with `sup{v(g) : g ∈ D}` at each extreme state; the model
/// is approximately interval exactly when they agree everywhere.
///
/// Closed forms exist when the pairing maps a ℚ-group onto all of `ℚ^k`
/// (then the sup is `f`) and when the group has a single generator (then `D`
/// is an interval of multiples of it). Anything else is `NotDecidable`.
pub fn ai_criterion(
    g: &GroupModel,
    s: &SimplexModel,
    f: &TraceNormMap,
    literal: bool,
) -> Result<AiVerdict> {
    check_dims(g, s, f)?;
    let sups = if g.kind == GroupKind::Rationals && rank(&g.pairing) == s.k {
        f.vertex_values.clone()
    } else if g.generators() == 1 {
        single_generator_sups(g, f, literal)
    } else {
        return Err(Error::NotDecidable(format!(
            "no closed form for a {}×{} pairing over {:?}",
            g.k(),
            g.generators(),
            g.kind
        )));
    };
    let vertices: Vec<VertexSup> = sups
        .into_iter()
        .zip(&f.vertex_values)
        .enumerate()
        .map(|(vertex, (sup, value))| VertexSup {
            vertex,
            equal: sup == *value,
            sup,
            value: value.clone(),
        })
        .collect();
    Ok(AiVerdict {
        ai: vertices.iter().all(|v| v.equal),
        vertices,
    })
}

/// Elements are `c·e` with `c` in ℚ or `q·ℤ`; membership cuts out an open
/// interval `lo < c < hi` around 0 (intersected with `c > 0` or `c < 0` by
/// the positivity filter).
fn single_generator_sups(g: &GroupModel, f: &TraceNormMap, literal: bool) -> Vec<ExtRational> {
    let p: Vec<&Rational> = g.pairing.iter().map(|row| &row[0]).collect();
    // None stands for an unbounded side.
    let mut hi: Option<Rational> = None;
    let mut lo: Option<Rational> = None;
    for (pj, fj) in p.iter().zip(&f.vertex_values) {
        let Some(fj) = fj.finite() else { continue };
        let bound = fj / *pj;
        if pj.is_positive() {
            hi = Some(hi.map_or(bound.clone(), |h| h.min(bound)));
        } else if pj.is_negative() {
            lo = Some(lo.map_or(bound.clone(), |l| l.max(bound)));
        }
    }
    if !literal {
        if p.iter().all(|x| x.is_positive()) {
            lo = Some(Rational::zero());
        } else if p.iter().all(|x| x.is_negative()) {
            hi = Some(Rational::zero());
        } else {
            lo = Some(Rational::zero());
            hi = Some(Rational::zero());
        }
    }
    // Largest admissible coefficient strictly below `hi` and smallest strictly
    // above `lo` (0 is always admissible); None means unbounded.
    let (top, bottom) = match &g.kind {
        GroupKind::Rationals => (hi, lo),
        GroupKind::ScaledIntegers { q } => {
            let below = |h: Rational| {
                let n = (&h / q).ceil() - Rational::one();
                (n * q).max(Rational::zero())
            };
            let above = |l: Rational| {
                let n = (&l / q).floor() + Rational::one();
                (n * q).min(Rational::zero())
            };
            (hi.map(below), lo.map(above))
        }
    };
    p.iter()
        .map(|pi| {
            if pi.is_positive() {
                top.as_ref().map_or(ExtRational::Infinite, |c| (c * *pi).into())
            } else if pi.is_negative() {
                bottom.as_ref().map_or(ExtRational::Infinite, |c| (c * *pi).into())
            } else {
                Rational::zero().into()
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LscDecomposition {
    /// Vertex values of the capped maps `f_n = min(f, c_n)`.
    #[serde(with = "crate::serial::rational_matrix")]
    pub partial: Vec<Vec<Rational>>,
    /// Vertex values of `g_1 = f_1` and `g_n = f_n − f_{n−1}`.
    #[serde(with = "crate::serial::rational_matrix")]
    pub increments: Vec<Vec<Rational>>,
}

/// Writes `f` as the increasing limit of the continuous affine maps
/// `min(f, c_n)` and returns their successive differences.
pub fn lsc_decompose(f: &TraceNormMap, caps: &[Rational]) -> Result<LscDecomposition> {
    let Some(first) = caps.first() else {
        return Err(Error::Empty("lsc decomposition needs at least one cap"));
    };
    if !first.is_positive() {
        return Err(Error::InvalidParameter(format!("first cap {first} is not positive")));
    }
    if let Some(w) = caps.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(format!(
            "caps must increase strictly: {} ≥ {}",
            w[0], w[1]
        )));
    }
    let partial: Vec<Vec<Rational>> = caps
        .iter()
        .map(|c| f.vertex_values.iter().map(|v| v.min_with(c)).collect())
        .collect();
    let increments = partial
        .iter()
        .enumerate()
        .map(|(n, fnv)| match n {
            0 => fnv.clone(),
            _ => fnv.iter().zip(&partial[n - 1]).map(|(a, b)| a - b).collect(),
        })
        .collect();
    Ok(LscDecomposition {
        partial,
        increments,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    AiDiagonal,
    /// Fails the AI criterion.
    OffDiagonal,
    UnboundedBoundary,
}

impl PointClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PointClass::AiDiagonal => "ai_diagonal",
            PointClass::OffDiagonal => "off_diagonal",
            PointClass::UnboundedBoundary => "unbounded_boundary",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub x: ExtRational,
    pub y: ExtRational,
    pub class: PointClass,
    pub on_diagonal: bool,
}

impl Classification {
    /// `x y class`, with `inf` for infinite coordinates.
    pub fn plot_row(&self) -> String {
        format!("{} {} {}", self.x, self.y, self.class.as_str())
    }
}

/// Places a point of the extended open first quadrant, read as the vertex
/// values of a trace-norm map on a two-vertex simplex, relative to the AI
/// criterion for the given group.
pub fn classify_point(x: &ExtRational, y: &ExtRational, group: &GroupModel) -> Result<Classification> {
    let f = TraceNormMap::new(vec![x.clone(), y.clone()])?;
    let on_diagonal = x == y;
    let class = if x.is_infinite() || y.is_infinite() {
        PointClass::UnboundedBoundary
    } else if ai_criterion(group, &SimplexModel { k: 2 }, &f, false)?.ai {
        PointClass::AiDiagonal
    } else {
        PointClass::OffDiagonal
    };
    Ok(Classification {
        x: x.clone(),
        y: y.clone(),
        class,
        on_diagonal,
    })
}
