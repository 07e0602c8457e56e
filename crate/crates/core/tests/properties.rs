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


mod common;

use common::{grid, oracle_le, q, rng, Eval};
use ctrace_core::blocks::{dim_from_nested, nested_from_dim, NestedPresentation, OpenSet};
use ctrace_core::existence::{
    choose_delta, make_underapprox, perturb_pattern, verify_certificate, PerturbationCertificate,
};
use ctrace_core::invariant::{
    ai_criterion, dimension_range_membership, ExtRational, GroupKind, GroupModel, SimplexModel,
    TraceNormMap,
};
use ctrace_core::patterns::{apply_pattern, push_dimension};
use ctrace_core::pwcalc::{le_pointwise, weighted_sup_norm, Interval, PlFunction};
use ctrace_core::unitary::{
    complement_isometry, patch_at_singularity, IsometryPath, Mat2, Sample, DEFAULT_TOL,
};
use ctrace_core::{rat, Rational};
use num_complex::Complex64 as C;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn open_set(rng: &mut ChaCha8Rng) -> OpenSet {
    let n = rng.gen_range(0..=3);
    let intervals = (0..n)
        .map(|_| {
            let a = rng.gen_range(0..19);
            let b = rng.gen_range(a + 1..=20);
            Interval {
                lo: rat(a, 20),
                hi: rat(b, 20),
                lo_closed: a == 0 && rng.gen_bool(0.5),
                hi_closed: b == 20 && rng.gen_bool(0.5),
            }
        })
        .collect();
    OpenSet::new(intervals).unwrap()
}

fn union(a: &OpenSet, b: &OpenSet) -> OpenSet {
    OpenSet::new(a.intervals().into_iter().chain(b.intervals()).collect()).unwrap()
}

/// `A_1 ⊇ … ⊇ A_{n−1}`, each obtained from the next by adding intervals.
fn nested(rng: &mut ChaCha8Rng) -> NestedPresentation {
    let levels = rng.gen_range(0..=3);
    let mut opens = vec![open_set(rng)];
    for _ in 1..levels {
        let bigger = union(opens.last().unwrap(), &open_set(rng));
        opens.push(bigger);
    }
    opens.truncate(levels);
    opens.reverse();
    NestedPresentation {
        n: levels as u32 + 1,
        opens,
    }
}

fn one() -> PlFunction {
    PlFunction::constant(Rational::one())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identity_is_neutral_for_composition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = common::random_pl(&mut r, 5, -8, 8, 4);
        let lam = common::random_eigenfunction(&mut r);
        prop_assert_eq!(f.compose(&PlFunction::identity()).unwrap(), f);
        prop_assert_eq!(PlFunction::identity().compose(&lam).unwrap(), lam);
    }

    #[test]
    fn composition_is_pointwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = common::random_pl(&mut r, 5, -8, 8, 4);
        let lam = common::random_eigenfunction(&mut r);
        let d = common::random_lsc_step(&mut r, 4, 0, 3);
        let fg = Eval::pl(&f.compose(&lam).unwrap());
        let dg = Eval::step(&d.compose_pl(&lam).unwrap());
        let (fe, le, de) = (Eval::pl(&f), Eval::pl(&lam), Eval::step(&d));
        for t in (0..=200).map(|k| common::Q::new(k, 200)) {
            prop_assert_eq!(fg.at(&t), fe.at(&le.at(&t)));
            prop_assert_eq!(dg.at(&t), de.at(&le.at(&t)));
        }
    }

    #[test]
    fn lsc_survives_continuous_substitution(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = common::random_lsc_step(&mut r, 5, 0, 4);
        let lam = common::random_eigenfunction(&mut r);
        prop_assert!(d.compose_pl(&lam).unwrap().is_lsc().lsc);
    }

    #[test]
    fn comparison_matches_oracle(seed in any::<u64>(), strict in any::<bool>()) {
        let mut r = rng(seed);
        let f = common::random_pl(&mut r, 5, 0, 16, 4);
        let g = common::random_lsc_step(&mut r, 5, 0, 4);
        let c = le_pointwise(&f, &g, strict);
        prop_assert_eq!(c.holds, oracle_le(&Eval::pl(&f), &Eval::step(&g), strict));
        let c = le_pointwise(&g, &f, strict);
        prop_assert_eq!(c.holds, oracle_le(&Eval::step(&g), &Eval::pl(&f), strict));
    }

    #[test]
    fn weighted_norm_is_a_norm(seed in any::<u64>(), c in -5i64..=5) {
        let mut r = rng(seed);
        let f = common::random_pl(&mut r, 5, -8, 8, 4);
        let g = common::random_pl(&mut r, 5, -8, 8, 4);
        let w = common::random_weight(&mut r, 4);
        let norm = |h: &PlFunction| weighted_sup_norm(h, &w).value;
        let c = rat(c, 2);
        prop_assert_eq!(norm(&f.scale(&c)), c.abs() * norm(&f));
        prop_assert!(norm(&f.add(&g)) <= norm(&f) + norm(&g));
        prop_assert_eq!(norm(&f).is_zero(), f.values().iter().all(Zero::is_zero));
    }

    #[test]
    fn dimension_round_trips_through_nested_sets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = common::random_dimension(&mut r, 5, 4);
        let p = nested_from_dim(&d);
        prop_assert!(p.check().is_ok());
        prop_assert_eq!(dim_from_nested(&p).unwrap(), d);
    }

    #[test]
    fn nested_open_sets_give_lsc_dimension(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = nested(&mut r);
        let d = dim_from_nested(&p).unwrap();
        prop_assert!(d.as_step().is_lsc().lsc);
        prop_assert_eq!(nested_from_dim(&d).n <= p.n, true);
    }

    #[test]
    fn enlarging_an_open_set_raises_dimension(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = nested(&mut r);
        prop_assume!(!p.opens.is_empty());
        let i = r.gen_range(0..p.opens.len());
        let mut bigger = p.clone();
        bigger.opens[i] = union(&p.opens[i], &open_set(&mut r));
        prop_assume!(bigger.check().is_ok());
        let (d, e) = (dim_from_nested(&p).unwrap(), dim_from_nested(&bigger).unwrap());
        prop_assert!(le_pointwise(d.as_step(), e.as_step(), false).holds);
    }

    #[test]
    fn patterns_are_linear_and_unital(seed in any::<u64>(), a in -4i64..=4, b in -4i64..=4) {
        let mut r = rng(seed);
        let t = common::random_pattern(&mut r, 5);
        let f = common::random_pl(&mut r, 4, -8, 8, 4);
        let g = common::random_pl(&mut r, 4, -8, 8, 4);
        let (a, b) = (rat(a, 1), rat(b, 3));
        let lhs = apply_pattern(&t, &f.scale(&a).add(&g.scale(&b)), false);
        let rhs = apply_pattern(&t, &f, false).scale(&a).add(&apply_pattern(&t, &g, false).scale(&b));
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(apply_pattern(&t, &one(), true), one());
        let m = rat(t.multiplicity() as i64, 1);
        prop_assert_eq!(apply_pattern(&t, &one(), false), PlFunction::constant(m));
    }

    #[test]
    fn patterns_are_positive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = common::random_pattern(&mut r, 5);
        let f = common::random_pl(&mut r, 4, -8, 8, 4);
        let g = f.add(&common::random_pl(&mut r, 4, 0, 8, 4));
        prop_assert!(le_pointwise(&apply_pattern(&t, &f, false), &apply_pattern(&t, &g, false), false).holds);
        let d = common::random_dimension(&mut r, 4, 3);
        let e = ctrace_core::blocks::DimensionFunction::new(d.as_step().add(&common::random_lsc_step(&mut r, 3, 0, 2))).unwrap();
        prop_assert!(le_pointwise(&push_dimension(&t, &d), &push_dimension(&t, &e), false).holds);
    }

    #[test]
    fn then_composes_patterns(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = common::random_pattern(&mut r, 3);
        let t = common::random_pattern(&mut r, 3);
        let f = common::random_pl(&mut r, 4, -8, 8, 4);
        let d = common::random_dimension(&mut r, 4, 3);
        let st = s.then(&t);
        prop_assert_eq!(st.multiplicity(), s.multiplicity() * t.multiplicity());
        prop_assert_eq!(apply_pattern(&st, &f, false), apply_pattern(&t, &apply_pattern(&s, &f, false), false));
        let twice = ctrace_core::blocks::DimensionFunction::new(push_dimension(&s, &d)).unwrap();
        prop_assert_eq!(push_dimension(&st, &d), push_dimension(&t, &twice));
    }

    #[test]
    fn certificates_survive_serialization(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d_a = common::random_dimension(&mut r, 4, 3);
        let t = common::random_pattern(&mut r, 4);
        let d_b = ctrace_core::blocks::DimensionFunction::new(push_dimension(&t, &d_a)).unwrap();
        let eps = rat(1, 2);
        let delta = choose_delta(&eps, t.multiplicity() as u32).unwrap().min(rat(1, 50));
        let family = [PlFunction::identity(), one()];
        let w = common::random_weight(&mut r, 3);
        let cert = perturb_pattern(
            &d_a, &make_underapprox(&d_a, &delta).unwrap(), &t, &d_b, &delta, &family, &eps, &w, &w,
        ).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: PerturbationCertificate = serde_json::from_str(&json).unwrap();
        prop_assert!(verify_certificate(&back).valid);
        prop_assert_eq!(back, cert);
    }

    #[test]
    fn membership_is_monotone_in_trace_norm(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(1..=3);
        let g = GroupModel::diagonal(GroupKind::Rationals, k).unwrap();
        let s = SimplexModel { k };
        let f: Vec<Rational> = (0..k).map(|_| rat(r.gen_range(1..=12), 4)).collect();
        let raised: Vec<ExtRational> = f
            .iter()
            .map(|v| if r.gen_bool(0.2) { ExtRational::Infinite } else { (v + rat(r.gen_range(0..=4), 4)).into() })
            .collect();
        let f = TraceNormMap::new(f.into_iter().map(Into::into).collect()).unwrap();
        let raised = TraceNormMap::new(raised).unwrap();
        let x = vec![rat(r.gen_range(-4..=16), 4)];
        let low = dimension_range_membership(&g, &s, &f, &x, false).unwrap();
        let high = dimension_range_membership(&g, &s, &raised, &x, false).unwrap();
        prop_assert!(!low.member || high.member);
    }

    #[test]
    fn full_rank_rational_groups_are_ai(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(1..=3);
        let pairing: Vec<Vec<Rational>> = (0..k)
            .map(|i| (0..k).map(|j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => rat(r.gen_range(1..=5), 1),
                std::cmp::Ordering::Less => rat(r.gen_range(-2..=2), 1),
                std::cmp::Ordering::Greater => Rational::zero(),
            }).collect())
            .collect();
        let g = GroupModel::new(GroupKind::Rationals, pairing).unwrap();
        let f = TraceNormMap::new(
            (0..k).map(|_| if r.gen_bool(0.2) { ExtRational::Infinite } else { rat(r.gen_range(1..=9), 2).into() }).collect(),
        )
        .unwrap();
        let verdict = ai_criterion(&g, &SimplexModel { k }, &f, false).unwrap();
        prop_assert!(verdict.ai);
    }

    #[test]
    fn complement_is_an_involution(
        a in 0.0..std::f64::consts::TAU,
        b in 0.0..std::f64::consts::TAU,
        p in 0.0..std::f64::consts::TAU,
        s in 0.0..std::f64::consts::FRAC_PI_2,
        t in 0.0..std::f64::consts::FRAC_PI_2,
    ) {
        let u = [C::new(s.cos(), 0.0), C::from_polar(s.sin(), a)];
        let v = [C::from_polar(t.cos(), p), C::from_polar(t.sin(), b)];
        let w = Mat2::outer(u, v);
        let wc = complement_isometry(&w, DEFAULT_TOL).unwrap();
        let back = complement_isometry(&wc, DEFAULT_TOL).unwrap();
        prop_assert!((back.inner(&w).norm() - 1.0).abs() < 1e-9);
        let sum = w + wc;
        prop_assert!((sum * sum.adjoint() - Mat2::identity()).norm() <= 2.0 * DEFAULT_TOL);
    }

    #[test]
    fn patch_phase_has_unit_modulus(theta in -3.0f64..3.0, alpha in 0.0f64..1.5, m in 4usize..40) {
        let phase = C::from_polar(1.0, theta);
        let path = IsometryPath {
            samples: (0..=m)
                .map(|i| {
                    let t = i as f64 / m as f64;
                    let r = Mat2::rotation(alpha * t);
                    let w = if t <= 0.5 { r * Mat2::unit(0, 0) } else { r * Mat2::diag(C::new(1.0, 0.0), phase) };
                    Sample { t, w }
                })
                .collect(),
            t_jump: 0.5,
            tol: DEFAULT_TOL,
            lipschitz: alpha * 1.000001,
        };
        let u = patch_at_singularity(&path).unwrap();
        prop_assert!((C::new(u.c[0], u.c[1]).norm() - 1.0).abs() <= DEFAULT_TOL);
        prop_assert!(u.samples.iter().all(|s| s.w.unitarity_defect() <= DEFAULT_TOL));
    }
}

#[test]
fn grid_covers_breakpoints_and_midpoints() {
    let pts = grid(vec![q(&rat(1, 3))]);
    assert!(pts.contains(&q(&rat(1, 3))) && pts.contains(&q(&rat(1, 6))) && pts.contains(&q(&rat(2, 3))));
    assert!(pts.windows(2).all(|w| w[0] < w[1]));
}
