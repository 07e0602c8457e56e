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

//! Eigenvalue-pattern maps `f ↦ Σ f∘λ_i` on `C[0,1]` and the checks built on
//! them: compatibility with a target dimension function, eigenvalue density,
//! the uniqueness norm hypothesis, gaps between pushed and target
//! dimension functions, and the strict inequality chain of an intertwining.

use crate::blocks::DimensionFunction;
use crate::pwcalc::{
    inf_difference, int, le_pointwise, weighted_sup_norm, Comparison, Extremum, Location,
    PlFunction, StepFunction, Weight,
};
use crate::{Error, Rational, Result};
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize};

/// Nonempty multiset of eigenfunctions `[0,1] → [0,1]`; the multiplicity is
/// the number of entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenPattern {
    eigenfunctions: Vec<PlFunction>,
}

impl EigenPattern {
    pub fn new(eigenfunctions: Vec<PlFunction>) -> Result<Self> {
        if eigenfunctions.is_empty() {
            return Err(Error::Empty("eigenvalue pattern needs an eigenfunction"));
        }
        for f in &eigenfunctions {
            f.check_into_unit()?;
        }
        Ok(EigenPattern { eigenfunctions })
    }

    /// `m` copies of the identity.
    pub fn identities(m: usize) -> Result<Self> {
        Self::new(vec![PlFunction::identity(); m])
    }

    pub fn eigenfunctions(&self) -> &[PlFunction] {
        &self.eigenfunctions
    }

    pub fn multiplicity(&self) -> usize {
        self.eigenfunctions.len()
    }

    /// Pattern of `f ↦ next(self(f))`: eigenfunctions `μ ∘ λ` for `μ` in
    /// `self` and `λ` in `next`.
    pub fn then(&self, next: &EigenPattern) -> EigenPattern {
        let eigenfunctions = next
            .eigenfunctions
            .iter()
            .flat_map(|lam| {
                self.eigenfunctions
                    .iter()
                    .map(move |mu| mu.compose(lam).expect("eigenfunctions map into [0,1]"))
            })
            .collect();
        EigenPattern { eigenfunctions }
    }
}

impl<'de> Deserialize<'de> for EigenPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            eigenfunctions: Vec<PlFunction>,
        }
        let r = Repr::deserialize(d)?;
        EigenPattern::new(r.eigenfunctions).map_err(de::Error::custom)
    }
}

/// `Σ f∘λ_i`, divided by the multiplicity when `normalized`.
pub fn apply_pattern(t: &EigenPattern, f: &PlFunction, normalized: bool) -> PlFunction {
    let terms: Vec<PlFunction> = t
        .eigenfunctions
        .iter()
        .map(|lam| f.compose(lam).expect("eigenfunctions map into [0,1]"))
        .collect();
    let c = if normalized {
        Rational::new(One::one(), t.multiplicity().into())
    } else {
        Rational::one()
    };
    PlFunction::linear_combine(&vec![c; terms.len()], &terms).expect("pattern is nonempty")
}

/// `Σ d∘λ_i`; lower semicontinuous whenever `d` is.
pub fn push_dimension(t: &EigenPattern, d: &DimensionFunction) -> StepFunction {
    push_step(t, d.as_step())
}

pub(crate) fn push_step(t: &EigenPattern, d: &StepFunction) -> StepFunction {
    let terms: Vec<StepFunction> = t
        .eigenfunctions
        .iter()
        .map(|lam| d.compose_pl(lam).expect("eigenfunctions map into [0,1]"))
        .collect();
    StepFunction::sum(&terms).expect("pattern is nonempty")
}

/// `T(f) ≤ (1 + slack)·d_B` pointwise, exactly.
pub fn check_compat(
    t: &EigenPattern,
    f: &PlFunction,
    d_b: &DimensionFunction,
    slack: &Rational,
) -> Result<Comparison> {
    if slack.is_negative() {
        return Err(Error::InvalidParameter(format!("slack {slack} is negative")));
    }
    let bound = d_b.as_step().scale(&(Rational::one() + slack));
    Ok(le_pointwise(&apply_pattern(t, f, false), &bound, false))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityFailure {
    /// Index `j` of the subinterval `[j/d, (j+1)/d]`.
    pub subinterval: usize,
    #[serde(with = "crate::serial::rational")]
    pub t: Rational,
    pub count: usize,
    #[serde(with = "crate::serial::rational")]
    pub required: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityVerdict {
    pub holds: bool,
    pub failure: Option<DensityFailure>,
}

fn check_density_params(d: usize, delta: &Rational) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("number of subintervals must be ≥ 1".into()));
    }
    if !delta.is_positive() || *delta > Rational::new(One::one(), d.into()) {
        return Err(Error::InvalidParameter(format!(
            "density fraction {delta} must lie in (0, 1/{d}]"
        )));
    }
    Ok(())
}

fn closed_indicator(lo: &Rational, hi: &Rational) -> StepFunction {
    let mut breaks = vec![Rational::zero(), lo.clone(), hi.clone(), Rational::one()];
    breaks.dedup();
    let inside = |t: &Rational| lo <= t && t <= hi;
    let at = breaks.iter().map(|t| indicator_value(inside(t))).collect();
    let gaps = breaks
        .windows(2)
        .map(|w| indicator_value(inside(&w[0]) && inside(&w[1])))
        .collect();
    StepFunction::from_parts(breaks, at, gaps).expect("sorted breakpoints")
}

fn indicator_value(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// For every `t` and every closed subinterval `[j/d, (j+1)/d]`, at least
/// `delta·M` eigenvalues `λ_i(t)` lie in it. The counts are step functions of
/// `t`, so the check is a finite minimum.
pub fn density_check(t: &EigenPattern, d: usize, delta: &Rational) -> Result<DensityVerdict> {
    check_density_params(d, delta)?;
    let required = delta * int(t.multiplicity() as i64);
    let dd = int(d as i64);
    for j in 0..d {
        let lo = int(j as i64) / &dd;
        let hi = int(j as i64 + 1) / &dd;
        let indicator = closed_indicator(&lo, &hi);
        let count = push_step(t, &indicator);
        let lowest = inf_difference(&count, &StepFunction::constant(Rational::zero()));
        if lowest.value < required {
            return Ok(DensityVerdict {
                holds: false,
                failure: Some(DensityFailure {
                    subinterval: j,
                    t: lowest.location.t().clone(),
                    count: lowest.value.to_integer().try_into().unwrap_or(0),
                    required,
                }),
            });
        }
    }
    Ok(DensityVerdict {
        holds: true,
        failure: None,
    })
}

/// Ramps `r̂_i`: 0 on `[0, i/d]`, 1 on `[(i+1)/d, 1]`, linear between.
pub fn test_functions(d: usize) -> Result<Vec<PlFunction>> {
    if d == 0 {
        return Err(Error::InvalidParameter("number of test functions must be ≥ 1".into()));
    }
    let dd = int(d as i64);
    (0..d)
        .map(|i| PlFunction::ramp(&(int(i as i64) / &dd), &(int(i as i64 + 1) / &dd)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TestFunctionCheck {
    pub index: usize,
    /// `‖(φ − ψ)(r̂_i)‖` in the codomain weight.
    pub difference: Extremum,
    /// `δ·‖r̂_i‖` in the domain weight.
    #[serde(with = "crate::serial::rational")]
    pub bound: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniquenessReport {
    pub holds: bool,
    pub density_phi: DensityVerdict,
    pub density_psi: DensityVerdict,
    pub checks: Vec<TestFunctionCheck>,
}

/// Both patterns are `δ`-dense on `d` subintervals and
/// `‖φ(r̂_i) − ψ(r̂_i)‖_{w_cod} < δ·‖r̂_i‖_{w_dom}` for every test ramp.
///
/// Scaling both weights by the same `κ > 0` scales both sides by `1/κ`, so
/// the verdict does not depend on the normalisation.
pub fn uniqueness_hypothesis_check(
    phi: &EigenPattern,
    psi: &EigenPattern,
    d: usize,
    delta: &Rational,
    w_dom: &Weight,
    w_cod: &Weight,
) -> Result<UniquenessReport> {
    let density_phi = density_check(phi, d, delta)?;
    let density_psi = density_check(psi, d, delta)?;
    let checks: Vec<TestFunctionCheck> = test_functions(d)?
        .iter()
        .enumerate()
        .map(|(index, r)| {
            let diff = apply_pattern(phi, r, false).sub(&apply_pattern(psi, r, false));
            let difference = weighted_sup_norm(&diff, w_cod);
            let bound = delta * weighted_sup_norm(r, w_dom).value;
            TestFunctionCheck {
                index,
                holds: difference.value < bound,
                difference,
                bound,
            }
        })
        .collect();
    Ok(UniquenessReport {
        holds: density_phi.holds && density_psi.holds && checks.iter().all(|c| c.holds),
        density_phi,
        density_psi,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapReport {
    /// `inf_t (d_tgt − T(d_src))(t)`; may be zero or negative.
    #[serde(with = "crate::serial::rational")]
    pub gap: Rational,
    pub location: Location,
    /// Strict inequality `T(d_src) < d_tgt` everywhere, i.e. `gap > 0`.
    pub positive: bool,
}

pub fn compute_gap(
    t: &EigenPattern,
    d_src: &DimensionFunction,
    d_tgt: &DimensionFunction,
) -> GapReport {
    let pushed = push_dimension(t, d_src);
    let e = inf_difference(d_tgt, &pushed);
    GapReport {
        positive: e.value.is_positive(),
        gap: e.value,
        location: e.location,
    }
}

/// One map `φ_{k,k+1}` of an inductive sequence together with the dimension
/// function of its target and the gap `δ_k` claimed for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub pattern: EigenPattern,
    pub target: DimensionFunction,
    #[serde(with = "crate::serial::rational")]
    pub gap: Rational,
}

/// `A_1 → A_2 → … → A_K` followed by `τ: A_K → B_N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    /// Dimension function of the first stage `A_1`.
    pub source: DimensionFunction,
    pub links: Vec<ChainLink>,
    pub tau: EigenPattern,
    /// Dimension function of `B_N`.
    pub target: DimensionFunction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainFailure {
    /// `"gap"` for a link, `"shifted"` for `τ∘…(f) + δ_1 < d_B + ε_N`,
    /// `"strict"` for the conclusion `τ∘…(f) < d_B`.
    pub check: String,
    pub link: Option<usize>,
    #[serde(with = "crate::serial::rational")]
    pub witness: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub verified: bool,
    pub link_gaps: Vec<GapReport>,
    pub failure: Option<ChainFailure>,
    /// `τ∘φ_{K−1,K}∘…∘φ_{1,2}(f)`.
    pub pushed: PlFunction,
    /// `inf_t (d_B − pushed)(t)`; positive exactly when the strict
    /// conclusion holds.
    pub margin: Extremum,
}

/// Verifies the strict inequality chain of an intertwining exactly.
///
/// Preconditions: `f ≤ P̂_{A_1}` pointwise, `δ_1 > 0`, `0 ≤ ε_N ≤ δ_1`.
pub fn verify_chain(
    chain: &Chain,
    f: &PlFunction,
    delta_1: &Rational,
    eps_n: &Rational,
) -> Result<ChainReport> {
    if !delta_1.is_positive() {
        return Err(Error::PreconditionFailed {
            what: format!("δ_1 = {delta_1} must be positive"),
            witness: None,
        });
    }
    if eps_n.is_negative() || eps_n > delta_1 {
        return Err(Error::PreconditionFailed {
            what: format!("ε_N = {eps_n} must lie in [0, δ_1 = {delta_1}]"),
            witness: None,
        });
    }
    let below = le_pointwise(f, &chain.source, false);
    if let Some(w) = below.witness {
        return Err(Error::PreconditionFailed {
            what: format!("f exceeds the first-stage dimension function ({} > {})", w.lhs, w.rhs),
            witness: Some(w.t),
        });
    }

    let mut failure = None;
    let mut link_gaps = Vec::with_capacity(chain.links.len());
    let mut src = &chain.source;
    let mut pushed = f.clone();
    for (k, link) in chain.links.iter().enumerate() {
        let g = compute_gap(&link.pattern, src, &link.target);
        if failure.is_none() && g.gap <= link.gap {
            failure = Some(ChainFailure {
                check: "gap".into(),
                link: Some(k),
                witness: g.location.t().clone(),
            });
        }
        link_gaps.push(g);
        pushed = apply_pattern(&link.pattern, &pushed, false);
        src = &link.target;
    }
    pushed = apply_pattern(&chain.tau, &pushed, false);

    let shifted = le_pointwise(
        &pushed.add_constant(delta_1),
        &chain.target.as_step().map_values(|v| v + eps_n),
        true,
    );
    if failure.is_none() {
        if let Some(w) = &shifted.witness {
            failure = Some(ChainFailure {
                check: "shifted".into(),
                link: None,
                witness: w.t.clone(),
            });
        }
    }
    let strict = le_pointwise(&pushed, &chain.target, true);
    if failure.is_none() {
        if let Some(w) = &strict.witness {
            failure = Some(ChainFailure {
                check: "strict".into(),
                link: None,
                witness: w.t.clone(),
            });
        }
    }
    let margin = inf_difference(&chain.target, &pushed);
    debug_assert!(!shifted.holds || strict.holds, "ε_N ≤ δ_1 makes the shift imply strictness");
    Ok(ChainReport {
        verified: failure.is_none(),
        link_gaps,
        failure,
        pushed,
        margin,
    })
}
