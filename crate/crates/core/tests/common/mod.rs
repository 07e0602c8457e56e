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


//! Random instance generators and a brute-force oracle that evaluates
//! functions independently of the library on a dense rational grid.

#![allow(dead_code)]

use ctrace_core::blocks::DimensionFunction;
use ctrace_core::patterns::EigenPattern;
use ctrace_core::pwcalc::{Piecewise, PlFunction, StepFunction, Weight};
use ctrace_core::{rat, Rational};
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = Ratio<i128>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(r: &Rational) -> Q {
    Q::new(r.numer().to_i128().unwrap(), r.denom().to_i128().unwrap())
}

/// Uniform sample count; `CTRACE_GRID_SAMPLES`, default 10 000.
pub fn grid_samples() -> i128 {
    std::env::var("CTRACE_GRID_SAMPLES")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(10_000)
}

// ---------------------------------------------------------------- generators

/// Distinct interior points `k/20`, sorted, at most `max` of them.
pub fn interior_points(rng: &mut ChaCha8Rng, max: usize) -> Vec<Rational> {
    let n = rng.gen_range(0..=max);
    let mut ks: Vec<i64> = (1..20).collect();
    ks.shuffle(rng);
    let mut ks: Vec<i64> = ks.into_iter().take(n).collect();
    ks.sort_unstable();
    ks.into_iter().map(|k| rat(k, 20)).collect()
}

fn with_ends(inner: Vec<Rational>) -> Vec<Rational> {
    let mut v = vec![Rational::zero()];
    v.extend(inner);
    v.push(Rational::one());
    v
}

/// PL function with breakpoints on the `1/20` grid and values `k/den`,
/// `lo ≤ k ≤ hi`.
pub fn random_pl(rng: &mut ChaCha8Rng, max_inner: usize, lo: i64, hi: i64, den: i64) -> PlFunction {
    let breaks = with_ends(interior_points(rng, max_inner));
    let values = breaks.iter().map(|_| rat(rng.gen_range(lo..=hi), den)).collect();
    PlFunction::from_parts(breaks, values).unwrap()
}

/// PL map into `[0,1]` with values on the `1/20` grid.
pub fn random_eigenfunction(rng: &mut ChaCha8Rng) -> PlFunction {
    if rng.gen_bool(0.15) {
        return PlFunction::identity();
    }
    random_pl(rng, 4, 0, 20, 20)
}

pub fn random_pattern(rng: &mut ChaCha8Rng, max_m: usize) -> EigenPattern {
    let m = rng.gen_range(1..=max_m);
    EigenPattern::new((0..m).map(|_| random_eigenfunction(rng)).collect()).unwrap()
}

/// Lower semicontinuous step function with integer values in `[lo, hi]` and
/// at most `max_disc` discontinuities (endpoints included).
pub fn random_lsc_step(rng: &mut ChaCha8Rng, max_disc: usize, lo: i64, hi: i64) -> StepFunction {
    let inner = interior_points(rng, max_disc);
    let budget = max_disc - inner.len();
    let breaks = with_ends(inner);
    let n = breaks.len();
    let gaps: Vec<Rational> = (0..n - 1).map(|_| rat(rng.gen_range(lo..=hi), 1)).collect();
    let mut jumps_left = budget;
    let at = (0..n)
        .map(|k| {
            let left = (k > 0).then(|| gaps[k - 1].clone());
            let right = (k + 1 < n).then(|| gaps[k].clone());
            let cap = match (&left, &right) {
                (Some(a), Some(b)) => a.clone().min(b.clone()),
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => unreachable!(),
            };
            let endpoint = k == 0 || k + 1 == n;
            if endpoint && (jumps_left == 0 || rng.gen_bool(0.7)) {
                return cap;
            }
            if endpoint {
                jumps_left -= 1;
            }
            let top = cap.to_integer().to_i64().unwrap();
            if rng.gen_bool(0.5) {
                cap
            } else {
                rat(rng.gen_range(lo..=top), 1)
            }
        })
        .collect();
    StepFunction::from_parts(breaks, at, gaps).unwrap()
}

pub fn random_dimension(rng: &mut ChaCha8Rng, max_disc: usize, hi: i64) -> DimensionFunction {
    DimensionFunction::new(random_lsc_step(rng, max_disc, 1, hi)).unwrap()
}

/// Strictly positive lsc weight with values in `{1, …, hi}`.
pub fn random_weight(rng: &mut ChaCha8Rng, hi: i64) -> Weight {
    Weight::new(random_lsc_step(rng, 4, 1, hi)).unwrap()
}

// ---------------------------------------------------------------- evaluation

/// Independent evaluator over `Ratio<i128>`.
#[derive(Clone, Debug)]
pub enum Eval {
    Pl { breaks: Vec<Q>, values: Vec<Q> },
    Step { breaks: Vec<Q>, at: Vec<Q>, gaps: Vec<Q> },
}

impl Eval {
    pub fn pl(f: &PlFunction) -> Self {
        Eval::Pl {
            breaks: f.breakpoints().iter().map(q).collect(),
            values: f.values().iter().map(q).collect(),
        }
    }

    pub fn step(f: &StepFunction) -> Self {
        Eval::Step {
            breaks: f.breakpoints().iter().map(q).collect(),
            at: f.point_values().iter().map(q).collect(),
            gaps: f.gap_values().iter().map(q).collect(),
        }
    }

    pub fn breaks(&self) -> &[Q] {
        match self {
            Eval::Pl { breaks, .. } | Eval::Step { breaks, .. } => breaks,
        }
    }

    pub fn at(&self, t: &Q) -> Q {
        match self {
            Eval::Pl { breaks, values } => match breaks.binary_search(t) {
                Ok(k) => values[k],
                Err(k) => {
                    let (a, b) = (breaks[k - 1], breaks[k]);
                    let (va, vb) = (values[k - 1], values[k]);
                    va + (t - a) * (vb - va) / (b - a)
                }
            },
            Eval::Step { breaks, at, gaps } => match breaks.binary_search(t) {
                Ok(k) => at[k],
                Err(k) => gaps[k - 1],
            },
        }
    }

    /// Points where a PL function crosses one of the `levels`.
    pub fn preimages(&self, levels: &[Q]) -> Vec<Q> {
        let Eval::Pl { breaks, values } = self else {
            panic!("preimages of a step function");
        };
        let mut out = Vec::new();
        for k in 0..breaks.len() - 1 {
            let (a, b, va, vb) = (breaks[k], breaks[k + 1], values[k], values[k + 1]);
            if va == vb {
                continue;
            }
            for c in levels {
                let (lo, hi) = if va < vb { (va, vb) } else { (vb, va) };
                if *c > lo && *c < hi {
                    out.push(a + (c - va) * (b - a) / (vb - va));
                }
            }
        }
        out
    }
}

/// Candidate points: the given points, midpoints of consecutive ones, and
/// `k/N` for `k = 0..=N`.
pub fn grid(points: Vec<Q>) -> Vec<Q> {
    let n = grid_samples();
    let mut pts = points;
    pts.push(Q::zero());
    pts.push(Q::one());
    pts.sort();
    pts.dedup();
    let mids: Vec<Q> = pts.windows(2).map(|w| (w[0] + w[1]) / 2).collect();
    pts.extend(mids);
    pts.extend((0..=n).map(|k| Q::new(k, n)));
    pts.sort();
    pts.dedup();
    pts
}

// ---------------------------------------------------------------- oracles

/// Brute-force `f ≤ g` (or `<`) over the grid.
pub fn oracle_le(f: &Eval, g: &Eval, strict: bool) -> bool {
    let pts = grid(f.breaks().iter().chain(g.breaks()).copied().collect());
    pts.iter().all(|t| {
        let (a, b) = (f.at(t), g.at(t));
        if strict {
            a < b
        } else {
            a <= b
        }
    })
}

/// Brute-force `min_t (d_tgt − Σ d_src∘λ_i)(t)`.
pub fn oracle_gap(pattern: &EigenPattern, d_src: &StepFunction, d_tgt: &StepFunction) -> Q {
    let src = Eval::step(d_src);
    let tgt = Eval::step(d_tgt);
    let lams: Vec<Eval> = pattern.eigenfunctions().iter().map(Eval::pl).collect();
    let mut pts: Vec<Q> = tgt.breaks().to_vec();
    for l in &lams {
        pts.extend(l.breaks());
        pts.extend(l.preimages(src.breaks()));
    }
    grid(pts)
        .iter()
        .map(|t| tgt.at(t) - lams.iter().map(|l| src.at(&l.at(t))).sum::<Q>())
        .min()
        .unwrap()
}

/// Brute-force `max_t |f(t)| / w(t)`.
pub fn oracle_norm(f: &PlFunction, w: &Weight) -> Q {
    let fe = Eval::pl(f);
    let we = Eval::step(w.as_step());
    grid(fe.breaks().iter().chain(we.breaks()).copied().collect())
        .iter()
        .map(|t| fe.at(t).abs() / we.at(t))
        .max()
        .unwrap()
}

/// Sup distance of two PL functions over their breakpoints.
pub fn sup_distance(f: &PlFunction, g: &PlFunction) -> Q {
    let (fe, ge) = (Eval::pl(f), Eval::pl(g));
    let mut pts: Vec<Q> = fe.breaks().iter().chain(ge.breaks()).copied().collect();
    pts.sort();
    pts.dedup();
    pts.iter().map(|t| (fe.at(t) - ge.at(t)).abs()).max().unwrap()
}
