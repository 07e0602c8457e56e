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

//! Perturbation of eigenvalue patterns past the discontinuities of a
//! dimension function, with an exactly checkable certificate, and the
//! counterexample showing a slack-only compatibility hypothesis is too weak.

use crate::blocks::{point_dip, DimensionFunction};
use crate::patterns::{apply_pattern, check_compat, push_dimension, push_step, EigenPattern};
use crate::pwcalc::{
    half, int, le_pointwise, weighted_sup_norm, Piecewise, PlFunction, StepFunction, Weight,
};
use crate::{Error, Rational, Result};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// `ε / (2M²)`.
pub fn choose_delta(eps: &Rational, m: u32) -> Result<Rational> {
    if !eps.is_positive() {
        return Err(Error::InvalidParameter(format!("tolerance {eps} must be positive")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("multiplicity must be ≥ 1".into()));
    }
    Ok(eps / (int(2) * int(m as i64) * int(m as i64)))
}

/// A discontinuity of a step function with its point value and one-sided
/// limits (a missing side at an endpoint copies the point value).
struct Jump {
    t0: Rational,
    left: Rational,
    at: Rational,
    right: Rational,
}

fn jumps(d: &StepFunction, delta: &Rational) -> Result<Vec<Jump>> {
    if !delta.is_positive() {
        return Err(Error::InvalidParameter(format!("window radius {delta} must be positive")));
    }
    let points = d.discontinuities();
    for w in points.windows(2) {
        if int(2) * delta >= &w[1] - &w[0] {
            return Err(Error::PreconditionFailed {
                what: format!(
                    "windows of radius {delta} around the discontinuities {} and {} overlap",
                    w[0], w[1]
                ),
                witness: Some(half(&w[0], &w[1])),
            });
        }
    }
    let zero = Rational::zero();
    let one = Rational::one();
    let mut out = Vec::with_capacity(points.len());
    for t0 in points {
        let interior = t0 > zero && t0 < one;
        if interior && (delta >= &t0 || *delta >= &one - &t0) {
            return Err(Error::PreconditionFailed {
                what: format!("window of radius {delta} around {t0} leaves [0,1]"),
                witness: Some(t0),
            });
        }
        let at = d.value_at(&t0);
        let left = if t0 > zero { d.left_limit(&t0) } else { at.clone() };
        let right = if t0 < one { d.right_limit(&t0) } else { at.clone() };
        out.push(Jump {
            t0,
            left,
            at,
            right,
        });
    }
    Ok(out)
}

/// Continuous under-approximation `f′` of a dimension function: equal to `d`
/// off the `δ`-windows around its discontinuities, equal to `d(t0)` at each
/// discontinuity, linear in between.
pub fn make_underapprox(d: &DimensionFunction, delta: &Rational) -> Result<PlFunction> {
    let step = d.as_step();
    let zero = Rational::zero();
    let one = Rational::one();
    let mut points = vec![(zero.clone(), step.value_at(&zero))];
    for j in jumps(step, delta)? {
        if j.t0 > zero {
            points.push((&j.t0 - delta, j.left.clone()));
        }
        points.push((j.t0.clone(), j.at.clone()));
        if j.t0 < one {
            points.push((&j.t0 + delta, j.right.clone()));
        }
    }
    points.push((one.clone(), step.value_at(&one)));
    points.dedup_by(|a, b| a.0 == b.0);
    PlFunction::new(points)
}

/// Continuous nondecreasing map `h` of `[0,1]` with `d(h(s)) ≤ f′(s)` and
/// `|h(s) − s| ≤ 2δ`, where `f′ = make_underapprox(d, δ)`. Each window is
/// collapsed to a point where `d` takes its low value and a ramp of width
/// `min(δ, room)/2` returns to the identity:
///
/// * jump up (`d(t0)` equals the left limit): collapse to `t0 − δ`, ramp right;
/// * jump down: collapse to `t0 + δ`, ramp left;
/// * isolated dip: collapse to `t0`, ramps on both sides;
/// * discontinuity at `0` or `1`: collapse to that endpoint.
pub fn retraction(d: &DimensionFunction, delta: &Rational) -> Result<PlFunction> {
    let zero = Rational::zero();
    let one = Rational::one();
    let js = jumps(d.as_step(), delta)?;
    let lo = |j: &Jump| (&j.t0 - delta).max(zero.clone());
    let hi = |j: &Jump| (&j.t0 + delta).min(one.clone());
    let mut points = vec![(zero.clone(), zero.clone())];
    for (k, j) in js.iter().enumerate() {
        let (wlo, whi) = (lo(j), hi(j));
        let left_room = &wlo - k.checked_sub(1).map_or(zero.clone(), |p| hi(&js[p]));
        let right_room = js.get(k + 1).map_or(one.clone(), lo) - &whi;
        let ramp = |room: Rational| room.min(delta.clone()) / int(2);
        let (clamp, ramp_left, ramp_right) = if j.t0.is_zero() {
            (zero.clone(), false, true)
        } else if j.t0.is_one() {
            (one.clone(), true, false)
        } else if j.at == j.left {
            (wlo.clone(), false, true)
        } else if j.at == j.right {
            (whi.clone(), true, false)
        } else {
            (j.t0.clone(), true, true)
        };
        if ramp_left {
            let s = &wlo - ramp(left_room);
            points.push((s.clone(), s));
        }
        points.push((wlo, clamp.clone()));
        points.push((whi.clone(), clamp));
        if ramp_right {
            let s = &whi + ramp(right_room);
            points.push((s.clone(), s));
        }
    }
    points.push((one.clone(), one));
    points.dedup_by(|a, b| a.0 == b.0);
    PlFunction::new(points)
}

fn sup_abs(f: &PlFunction) -> Rational {
    f.max_value().abs().max(f.min_value().abs())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    /// `‖T(a) − T̂(a)‖` in the codomain weight.
    #[serde(with = "crate::serial::rational")]
    pub deviation: Rational,
    /// `ε·‖a‖` in the domain weight.
    #[serde(with = "crate::serial::rational")]
    pub bound: Rational,
}

/// Everything needed to re-check a perturbation from scratch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationCertificate {
    pub d_a: DimensionFunction,
    pub f_prime: PlFunction,
    pub d_b: DimensionFunction,
    pub family: Vec<PlFunction>,
    #[serde(with = "crate::serial::rational")]
    pub eps: Rational,
    #[serde(with = "crate::serial::rational")]
    pub delta: Rational,
    pub w_dom: Weight,
    pub w_cod: Weight,
    pub original: EigenPattern,
    pub perturbed: EigenPattern,
    /// `‖λ_i − λ̂_i‖∞` per eigenfunction.
    #[serde(with = "crate::serial::rational_vec")]
    pub distances: Vec<Rational>,
    /// Whether `T(f′) ≤ d_B` held; the construction does not rely on it.
    pub hypothesis: bool,
    #[serde(with = "crate::serial::rational_opt")]
    pub hypothesis_witness: Option<Rational>,
    pub deviations: Vec<Deviation>,
}

/// Builds `T̂` with eigenfunctions `h ∘ λ_i` for the retraction `h`, so that
/// `‖λ_i − λ̂_i‖∞ ≤ 2δ` and `d_A ∘ λ̂_i ≤ f′ ∘ λ_i`, then checks exactly that
/// `Σ d_A ∘ λ̂_i ≤ d_B` and that `T̂` is within `ε` of `T` on the family.
#[allow(clippy::too_many_arguments)]
pub fn perturb_pattern(
    d_a: &DimensionFunction,
    f_prime: &PlFunction,
    t: &EigenPattern,
    d_b: &DimensionFunction,
    delta: &Rational,
    family: &[PlFunction],
    eps: &Rational,
    w_dom: &Weight,
    w_cod: &Weight,
) -> Result<PerturbationCertificate> {
    if !eps.is_positive() {
        return Err(Error::InvalidParameter(format!("tolerance {eps} must be positive")));
    }
    let below = le_pointwise(f_prime, d_a, false);
    if let Some(w) = below.witness {
        return Err(Error::PreconditionFailed {
            what: format!("f′ exceeds d_A ({} > {})", w.lhs, w.rhs),
            witness: Some(w.t),
        });
    }
    let expected = make_underapprox(d_a, delta)?;
    if *f_prime != expected {
        let diff = le_pointwise(f_prime, &expected, false)
            .witness
            .or(le_pointwise(&expected, f_prime, false).witness);
        return Err(Error::PreconditionFailed {
            what: format!("f′ is not the under-approximation of d_A with window radius {delta}"),
            witness: diff.map(|w| w.t),
        });
    }
    let hypothesis = check_compat(t, f_prime, d_b, &Rational::zero())?;

    let h = retraction(d_a, delta)?;
    let perturbed = EigenPattern::new(
        t.eigenfunctions()
            .iter()
            .map(|lam| h.compose(lam))
            .collect::<Result<_>>()?,
    )?;
    let pushed = push_dimension(&perturbed, d_a);
    if let Some(w) = le_pointwise(&pushed, d_b, false).witness {
        return Err(Error::Infeasible {
            what: format!(
                "perturbed pattern pushes d_A to {} above d_B = {}",
                w.lhs, w.rhs
            ),
            witness: w.t,
        });
    }
    let distances = t
        .eigenfunctions()
        .iter()
        .zip(perturbed.eigenfunctions())
        .map(|(a, b)| sup_abs(&a.sub(b)))
        .collect();
    let mut deviations = Vec::with_capacity(family.len());
    for (index, a) in family.iter().enumerate() {
        let dev = deviation(t, &perturbed, a, eps, w_dom, w_cod);
        if dev.deviation > dev.bound {
            return Err(Error::ToleranceExceeded {
                index,
                deviation: dev.deviation,
                bound: dev.bound,
            });
        }
        deviations.push(dev);
    }
    Ok(PerturbationCertificate {
        d_a: d_a.clone(),
        f_prime: f_prime.clone(),
        d_b: d_b.clone(),
        family: family.to_vec(),
        eps: eps.clone(),
        delta: delta.clone(),
        w_dom: w_dom.clone(),
        w_cod: w_cod.clone(),
        original: t.clone(),
        perturbed,
        distances,
        hypothesis: hypothesis.holds,
        hypothesis_witness: hypothesis.witness.map(|w| w.t),
        deviations,
    })
}

fn deviation(
    t: &EigenPattern,
    t_hat: &EigenPattern,
    a: &PlFunction,
    eps: &Rational,
    w_dom: &Weight,
    w_cod: &Weight,
) -> Deviation {
    let diff = apply_pattern(t, a, false).sub(&apply_pattern(t_hat, a, false));
    Deviation {
        deviation: weighted_sup_norm(&diff, w_cod).value,
        bound: eps * weighted_sup_norm(a, w_dom).value,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckItem {
    pub check: String,
    pub index: Option<usize>,
    pub holds: bool,
    #[serde(with = "crate::serial::rational_opt")]
    pub witness: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateVerdict {
    pub valid: bool,
    pub checks: Vec<CheckItem>,
}

/// Re-derives every recorded fact of a certificate from its inputs.
pub fn verify_certificate(c: &PerturbationCertificate) -> CertificateVerdict {
    let mut checks = Vec::new();
    let mut item = |check: &str, index: Option<usize>, holds: bool, witness: Option<Rational>| {
        checks.push(CheckItem {
            check: check.into(),
            index,
            holds,
            witness,
        })
    };

    let under = le_pointwise(&c.f_prime, &c.d_a, false);
    let matches = make_underapprox(&c.d_a, &c.delta).is_ok_and(|g| g == c.f_prime);
    item("underapprox", None, under.holds && matches, under.witness.map(|w| w.t));

    let lams = c.original.eigenfunctions();
    let hats = c.perturbed.eigenfunctions();
    let same_len = lams.len() == hats.len() && c.distances.len() == lams.len();
    item("multiplicity", None, same_len, None);
    if !same_len {
        return CertificateVerdict {
            valid: false,
            checks,
        };
    }

    let two_delta = int(2) * &c.delta;
    for (i, (lam, hat)) in lams.iter().zip(hats).enumerate() {
        let dist = sup_abs(&lam.sub(hat));
        item("distance", Some(i), dist <= two_delta && dist == c.distances[i], None);
        let lhs = c.d_a.as_step().compose_pl(hat).expect("eigenfunctions map into [0,1]");
        let rhs = c.f_prime.compose(lam).expect("eigenfunctions map into [0,1]");
        let cmp = le_pointwise(&lhs, &rhs, false);
        item("pointwise", Some(i), cmp.holds, cmp.witness.map(|w| w.t));
    }

    let pushed = push_step(&c.perturbed, c.d_a.as_step());
    let sum = le_pointwise(&pushed, &c.d_b, false);
    item("sum", None, sum.holds, sum.witness.map(|w| w.t));

    let hyp = check_compat(&c.original, &c.f_prime, &c.d_b, &Rational::zero())
        .expect("zero slack is valid");
    item(
        "hypothesis_record",
        None,
        hyp.holds == c.hypothesis && hyp.witness.map(|w| w.t) == c.hypothesis_witness,
        None,
    );

    let same_family = c.deviations.len() == c.family.len();
    item("family", None, same_family, None);
    for (i, a) in c.family.iter().enumerate() {
        let dev = deviation(&c.original, &c.perturbed, a, &c.eps, &c.w_dom, &c.w_cod);
        let recorded = c.deviations.get(i) == Some(&dev);
        item("deviation", Some(i), dev.deviation <= dev.bound && recorded, None);
    }

    CertificateVerdict {
        valid: checks.iter().all(|c| c.holds),
        checks,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Infeasibility {
    pub holds: bool,
    #[serde(with = "crate::serial::rational")]
    pub t: Rational,
    /// Perturbed eigenvalues at `t` are confined to `[0, radius]`.
    #[serde(with = "crate::serial::rational")]
    pub radius: Rational,
    /// Least possible value of `Σ d_A(μ_i(t))` under that confinement.
    #[serde(with = "crate::serial::rational")]
    pub least_sum: Rational,
    #[serde(with = "crate::serial::rational")]
    pub d_b_at_t: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    #[serde(with = "crate::serial::rational")]
    pub delta: Rational,
    #[serde(with = "crate::serial::rational")]
    pub eps0: Rational,
    pub multiplicity: u32,
    pub d_b_value: u32,
    /// `T(f) ≤ (1 + δ)·d_B`.
    pub hypothesis: bool,
    #[serde(with = "crate::serial::rational")]
    pub hypothesis_margin: Rational,
    pub infeasibility: Infeasibility,
    /// Witness reported when the concrete perturbation is attempted anyway.
    #[serde(with = "crate::serial::rational_opt")]
    pub construction_witness: Option<Rational>,
}

/// Dimension function `2` off `1/2` and `1` at `1/2`, identity eigenvalue
/// pattern of the least multiplicity `M` with `1/(2M − 1) < δ`, and target
/// `d_B ≡ 2M − 1`. The slack hypothesis holds, yet any pattern within `ε_0`
/// of the identities at `t = 0` pushes `d_A` to `2M > d_B(0)`.
pub fn reproduce_counterexample(delta: &Rational, eps0: &Rational) -> Result<CounterexampleReport> {
    if !delta.is_positive() || *delta >= Rational::one() {
        return Err(Error::InvalidParameter(format!("slack {delta} must lie in (0, 1)")));
    }
    if !eps0.is_positive() || *eps0 >= Rational::new(1.into(), 4.into()) {
        return Err(Error::InvalidParameter(format!("ε_0 = {eps0} must lie in (0, 1/4)")));
    }
    let m_big = ((delta.recip() + Rational::one()) / int(2)).floor() + Rational::one();
    let m: u32 = m_big
        .to_integer()
        .try_into()
        .map_err(|_| Error::InvalidParameter(format!("slack {delta} is too small")))?;
    let d_a = point_dip(Rational::new(1.into(), 2.into()), 2, 1)?;
    let d_b = DimensionFunction::constant(2 * m - 1)?;
    let t = EigenPattern::identities(m as usize)?;

    let f = make_underapprox(&d_a, &Rational::new(1.into(), 8.into()))?;
    let hypothesis = check_compat(&t, &f, &d_b, delta)?;
    let bound = d_b.as_step().scale(&(Rational::one() + delta));
    let margin = crate::pwcalc::inf_difference(&bound, &apply_pattern(&t, &f, false)).value;

    let zero = Rational::zero();
    let radius = int(2) * eps0;
    let least_sum = d_a.as_step().min_on(&zero, &radius)? * int(m as i64);
    let d_b_at_t = d_b.value_at(&zero);
    let infeasibility = Infeasibility {
        holds: least_sum > d_b_at_t,
        t: zero,
        radius,
        least_sum,
        d_b_at_t,
    };

    let fine = choose_delta(eps0, m)?;
    let construction_witness = match perturb_pattern(
        &d_a,
        &make_underapprox(&d_a, &fine)?,
        &t,
        &d_b,
        &fine,
        &[PlFunction::identity()],
        eps0,
        &Weight::unit(),
        &Weight::constant(int(m as i64))?,
    ) {
        Err(Error::Infeasible { witness, .. }) => Some(witness),
        _ => None,
    };

    Ok(CounterexampleReport {
        delta: delta.clone(),
        eps0: eps0.clone(),
        multiplicity: m,
        d_b_value: 2 * m - 1,
        hypothesis: hypothesis.holds,
        hypothesis_margin: margin,
        infeasibility,
        construction_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::single_jump;
    use crate::rat;

    fn pl(pts: &[(Rational, Rational)]) -> PlFunction {
        PlFunction::new(pts.to_vec()).unwrap()
    }

    fn dip() -> DimensionFunction {
        point_dip(rat(1, 2), 2, 1).unwrap()
    }

    fn identity_instance(eps: Rational, m: u32) -> Result<PerturbationCertificate> {
        let d_a = dip();
        let delta = choose_delta(&eps, m).unwrap();
        let f = make_underapprox(&d_a, &delta).unwrap();
        perturb_pattern(
            &d_a,
            &f,
            &EigenPattern::identities(m as usize).unwrap(),
            &DimensionFunction::constant(2 * m).unwrap(),
            &delta,
            &[PlFunction::identity()],
            &eps,
            &Weight::unit(),
            &Weight::unit(),
        )
    }

    #[test]
    fn delta_choice() {
        assert_eq!(choose_delta(&rat(1, 2), 2).unwrap(), rat(1, 16));
        assert_eq!(choose_delta(&rat(1, 1), 1).unwrap(), rat(1, 2));
        assert_eq!(choose_delta(&rat(2, 1), 10).unwrap(), rat(1, 100));
        assert!(choose_delta(&rat(0, 1), 1).is_err());
        assert!(choose_delta(&rat(1, 1), 0).is_err());
    }

    #[test]
    fn underapprox_examples() {
        let c = DimensionFunction::constant(3).unwrap();
        assert_eq!(make_underapprox(&c, &rat(1, 8)).unwrap(), PlFunction::constant(rat(3, 1)));

        let jump = single_jump(rat(1, 2)).unwrap();
        let f = make_underapprox(&jump, &rat(1, 8)).unwrap();
        let want = pl(&[
            (rat(0, 1), rat(1, 1)),
            (rat(1, 2), rat(1, 1)),
            (rat(5, 8), rat(2, 1)),
            (rat(1, 1), rat(2, 1)),
        ]);
        assert_eq!(f, want);

        let f = make_underapprox(&dip(), &rat(1, 8)).unwrap();
        let want = pl(&[
            (rat(0, 1), rat(2, 1)),
            (rat(3, 8), rat(2, 1)),
            (rat(1, 2), rat(1, 1)),
            (rat(5, 8), rat(2, 1)),
            (rat(1, 1), rat(2, 1)),
        ]);
        assert_eq!(f, want);
    }

    #[test]
    fn underapprox_rejects_wide_windows() {
        assert!(matches!(
            make_underapprox(&dip(), &rat(1, 2)),
            Err(Error::PreconditionFailed { .. })
        ));
        let two = DimensionFunction::new(
            StepFunction::from_parts(
                vec![rat(0, 1), rat(1, 4), rat(1, 2), rat(1, 1)],
                vec![rat(1, 1), rat(1, 1), rat(2, 1), rat(3, 1)],
                vec![rat(1, 1), rat(2, 1), rat(3, 1)],
            )
            .unwrap(),
        )
        .unwrap();
        assert!(make_underapprox(&two, &rat(1, 8)).is_err());
        assert!(make_underapprox(&two, &rat(1, 9)).is_ok());
    }

    #[test]
    fn endpoint_discontinuity() {
        let d = DimensionFunction::new(
            StepFunction::from_parts(vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1)])
                .unwrap(),
        )
        .unwrap();
        let f = make_underapprox(&d, &rat(1, 4)).unwrap();
        assert_eq!(f, pl(&[(rat(0, 1), rat(1, 1)), (rat(1, 4), rat(2, 1)), (rat(1, 1), rat(2, 1))]));
        let h = retraction(&d, &rat(1, 4)).unwrap();
        assert_eq!(h.eval(&rat(1, 4)).unwrap(), rat(0, 1));
        assert_eq!(h.eval(&rat(1, 2)).unwrap(), rat(1, 2));
    }

    #[test]
    fn upward_jump_retraction() {
        let delta = rat(1, 16);
        let h = retraction(&single_jump(rat(1, 2)).unwrap(), &delta).unwrap();
        let t0 = rat(1, 2);
        assert_eq!(h.eval(&(&t0 - &delta)).unwrap(), &t0 - &delta);
        assert_eq!(h.eval(&t0).unwrap(), &t0 - &delta);
        assert_eq!(h.eval(&(&t0 + &delta)).unwrap(), &t0 - &delta);
        // ramp width min(δ, room)/2 = δ/2
        let end = &t0 + &delta + &delta / rat(2, 1);
        assert_eq!(h.eval(&end).unwrap(), end);
        assert_eq!(sup_abs(&h.sub(&PlFunction::identity())), rat(2, 1) * &delta);
    }

    #[test]
    fn identities_across_a_dip() {
        let m = 3;
        let cert = identity_instance(rat(1, 2), m).unwrap();
        let delta = choose_delta(&rat(1, 2), m).unwrap();
        assert!(cert.hypothesis);
        // an isolated dip collapses onto t0 itself
        assert!(cert.distances.iter().all(|d| *d == delta));
        let pushed = push_dimension(&cert.perturbed, &cert.d_a);
        assert!(le_pointwise(&pushed, &cert.d_b, false).holds);
        assert!(verify_certificate(&cert).valid);
    }

    #[test]
    fn jump_instance_moves_eigenvalues_by_two_delta() {
        let m = 2;
        let eps = rat(1, 2);
        let delta = choose_delta(&eps, m).unwrap();
        let d_a = single_jump(rat(1, 2)).unwrap();
        let cert = perturb_pattern(
            &d_a,
            &make_underapprox(&d_a, &delta).unwrap(),
            &EigenPattern::identities(m as usize).unwrap(),
            &DimensionFunction::constant(2 * m).unwrap(),
            &delta,
            &[PlFunction::identity()],
            &eps,
            &Weight::unit(),
            &Weight::unit(),
        )
        .unwrap();
        assert!(cert.distances.iter().all(|d| *d == rat(2, 1) * &delta));
        assert_eq!(cert.perturbed.eigenfunctions()[0], retraction(&d_a, &delta).unwrap());
        assert!(verify_certificate(&cert).valid);
    }

    #[test]
    fn continuous_dimension_function_needs_no_perturbation() {
        let d_a = DimensionFunction::constant(2).unwrap();
        let t = EigenPattern::new(vec![PlFunction::identity(), PlFunction::constant(rat(1, 3))]).unwrap();
        let f = make_underapprox(&d_a, &rat(1, 10)).unwrap();
        let cert = perturb_pattern(
            &d_a,
            &f,
            &t,
            &DimensionFunction::constant(4).unwrap(),
            &rat(1, 10),
            &[PlFunction::identity()],
            &rat(1, 100),
            &Weight::unit(),
            &Weight::unit(),
        )
        .unwrap();
        assert_eq!(cert.perturbed, t);
        assert!(cert.distances.iter().all(Zero::is_zero));
    }

    #[test]
    fn counterexample_instance_is_infeasible() {
        let m = 6;
        let d_a = dip();
        let delta = choose_delta(&rat(1, 10), m).unwrap();
        let err = perturb_pattern(
            &d_a,
            &make_underapprox(&d_a, &delta).unwrap(),
            &EigenPattern::identities(m as usize).unwrap(),
            &DimensionFunction::constant(2 * m - 1).unwrap(),
            &delta,
            &[],
            &rat(1, 10),
            &Weight::unit(),
            &Weight::unit(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Infeasible { witness, .. } if witness == rat(0, 1)));
    }

    #[test]
    fn preconditions_reported() {
        let d_a = dip();
        let delta = rat(1, 16);
        let wrong = make_underapprox(&d_a, &rat(1, 8)).unwrap();
        let e = perturb_pattern(
            &d_a,
            &wrong,
            &EigenPattern::identities(1).unwrap(),
            &DimensionFunction::constant(2).unwrap(),
            &delta,
            &[],
            &rat(1, 10),
            &Weight::unit(),
            &Weight::unit(),
        )
        .unwrap_err();
        assert!(matches!(e, Error::PreconditionFailed { witness: Some(_), .. }));
    }

    #[test]
    fn tampered_certificates_fail() {
        let mut cert = identity_instance(rat(1, 2), 2).unwrap();
        let original = cert.clone();
        cert.perturbed = cert.original.clone();
        let v = verify_certificate(&cert);
        assert!(!v.valid);
        assert!(v.checks.iter().any(|c| c.check == "pointwise" && !c.holds));

        let mut cert = original;
        cert.eps = cert.deviations[0].deviation.clone() / rat(2, 1);
        let v = verify_certificate(&cert);
        assert!(!v.valid);
        let failed: Vec<_> = v.checks.iter().filter(|c| !c.holds).map(|c| c.check.as_str()).collect();
        assert_eq!(failed, vec!["deviation"]);
    }

    #[test]
    fn tolerance_exceeded() {
        let err = identity_instance(rat(1, 2), 2).map(|_| ()).and_then(|_| {
            let d_a = dip();
            let delta = rat(1, 16);
            perturb_pattern(
                &d_a,
                &make_underapprox(&d_a, &delta).unwrap(),
                &EigenPattern::identities(2).unwrap(),
                &DimensionFunction::constant(4).unwrap(),
                &delta,
                &[PlFunction::identity()],
                &rat(1, 100),
                &Weight::unit(),
                &Weight::unit(),
            )
            .map(|_| ())
        });
        assert!(matches!(err, Err(Error::ToleranceExceeded { index: 0, .. })));
    }

    #[test]
    fn counterexample_reports() {
        let r = reproduce_counterexample(&rat(1, 10), &rat(1, 5)).unwrap();
        assert_eq!(r.multiplicity, 6);
        assert_eq!(r.d_b_value, 11);
        assert!(r.hypothesis);
        assert_eq!(r.hypothesis_margin, rat(121, 10) - rat(12, 1));
        assert!(r.infeasibility.holds);
        assert_eq!(r.infeasibility.least_sum, rat(12, 1));
        assert_eq!(r.construction_witness, Some(rat(0, 1)));

        let r = reproduce_counterexample(&rat(1, 2), &rat(1, 5)).unwrap();
        assert_eq!((r.multiplicity, r.d_b_value), (2, 3));
        assert_eq!(r.infeasibility.least_sum, rat(4, 1));

        assert!(reproduce_counterexample(&rat(1, 10), &rat(1, 3)).is_err());
        assert!(reproduce_counterexample(&rat(1, 1), &rat(1, 5)).is_err());
    }

    #[test]
    fn certificate_json_round_trip() {
        let cert = identity_instance(rat(1, 2), 2).unwrap();
        let s = serde_json::to_string(&cert).unwrap();
        let back: PerturbationCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cert);
        assert!(verify_certificate(&back).valid);
    }
}
