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

//! Completing a path of rank-one partial isometries in `M_2` to a continuous
//! path of unitaries across the point where the fibre jumps from rank one to
//! full rank. Floating point with explicit tolerances: the phase data
//! involved is irrational in general.

use crate::{Error, Result};
use num_complex::Complex64;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Add, Mul, Sub};

pub const DEFAULT_TOL: f64 = 1e-9;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[C::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        Self::diag(C::new(1.0, 0.0), C::new(1.0, 0.0))
    }

    pub fn diag(a: C, b: C) -> Self {
        let z = C::new(0.0, 0.0);
        Mat2([[a, z], [z, b]])
    }

    /// Matrix unit `e_{ij}` (zero-based).
    pub fn unit(i: usize, j: usize) -> Self {
        let mut m = Self::zero();
        m.0[i][j] = C::new(1.0, 0.0);
        m
    }

    pub fn real(rows: [[f64; 2]; 2]) -> Self {
        Mat2(rows.map(|r| r.map(|x| C::new(x, 0.0))))
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::real([[c, -s], [s, c]])
    }

    /// `u v*`.
    pub fn outer(u: [C; 2], v: [C; 2]) -> Self {
        Mat2([
            [u[0] * v[0].conj(), u[0] * v[1].conj()],
            [u[1] * v[0].conj(), u[1] * v[1].conj()],
        ])
    }

    pub fn adjoint(&self) -> Self {
        let a = &self.0;
        Mat2([
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ])
    }

    pub fn scale(&self, c: C) -> Self {
        Mat2(self.0.map(|r| r.map(|x| x * c)))
    }

    pub fn trace(&self) -> C {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn apply(&self, v: [C; 2]) -> [C; 2] {
        let a = &self.0;
        [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
    }

    pub fn column(&self, j: usize) -> [C; 2] {
        [self.0[0][j], self.0[1][j]]
    }

    /// Frobenius inner product `tr(self* other)`.
    pub fn inner(&self, other: &Mat2) -> C {
        (self.adjoint() * *other).trace()
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Operator norm: square root of the top eigenvalue of `A*A`.
    pub fn norm(&self) -> f64 {
        let b = self.adjoint() * *self;
        let tr = b.trace().re;
        let det = b.det().re;
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        ((tr + disc) / 2.0).max(0.0).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    /// `‖A*A − I‖`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::identity()).norm()
    }

    /// `max(‖W W* W − W‖, |tr(W*W) − 1|)`.
    pub fn rank_one_defect(&self) -> f64 {
        let cubic = (*self * self.adjoint() * *self - *self).norm();
        let trace = ((self.adjoint() * *self).trace() - C::new(1.0, 0.0)).norm();
        cubic.max(trace)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] += o.0[i][j];
            }
        }
        m
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(C::new(-1.0, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
        }))
    }
}

#[derive(Serialize, Deserialize)]
struct Mat2Repr {
    re: [[f64; 2]; 2],
    im: [[f64; 2]; 2],
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Mat2Repr {
            re: self.0.map(|r| r.map(|z| z.re)),
            im: self.0.map(|r| r.map(|z| z.im)),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = Mat2Repr::deserialize(d)?;
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = C::new(r.re[i][j], r.im[i][j]);
            }
        }
        if !m.is_finite() {
            return Err(de::Error::custom("matrix entries must be finite"));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    #[serde(flatten)]
    pub w: Mat2,
}

/// Samples of `W(t)` on `0 = t_0 < … < t_m = 1`: rank-one partial
/// isometries up to `t_jump`, unitaries after it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryPath {
    pub samples: Vec<Sample>,
    pub t_jump: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Bound `L` with `‖W(t_{i+1}) − W(t_i)‖ ≤ L·(t_{i+1} − t_i) + tol` on each side of the jump.
    pub lipschitz: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn numerical(what: impl Into<String>, residual: f64) -> Error {
    Error::Numerical {
        what: what.into(),
        residual,
    }
}

impl IsometryPath {
    /// Index of the last sample at or before the jump.
    pub fn last_before_jump(&self) -> usize {
        self.samples
            .iter()
            .rposition(|s| s.t <= self.t_jump)
            .expect("the first sample is 0 ≤ t_jump")
    }

    pub fn check(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance {} must be positive", self.tol)));
        }
        if !(self.lipschitz >= 0.0 && self.lipschitz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Lipschitz bound {} must be finite and nonnegative",
                self.lipschitz
            )));
        }
        if !(0.0..1.0).contains(&self.t_jump) {
            return Err(Error::InvalidParameter(format!("jump {} must lie in [0, 1)", self.t_jump)));
        }
        let ts: Vec<f64> = self.samples.iter().map(|s| s.t).collect();
        if ts.len() < 2 || ts[0] != 0.0 || ts[ts.len() - 1] != 1.0 || ts.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::InvalidParameter(
                "samples must run strictly increasing from 0 to 1".into(),
            ));
        }
        for s in &self.samples {
            if s.t <= self.t_jump {
                let defect = s.w.rank_one_defect();
                if defect > self.tol {
                    return Err(numerical(
                        format!("W({}) is not a rank-one partial isometry", s.t),
                        defect,
                    ));
                }
            } else {
                let defect = s.w.unitarity_defect();
                if defect > self.tol {
                    return Err(numerical(format!("W({}) is not unitary", s.t), defect));
                }
            }
        }
        for w in self.samples.windows(2) {
            if (w[0].t <= self.t_jump) != (w[1].t <= self.t_jump) {
                continue;
            }
            let step = (w[1].w - w[0].w).norm();
            let allowed = self.lipschitz * (w[1].t - w[0].t) + self.tol;
            if step > allowed {
                return Err(numerical(
                    format!("W jumps between t = {} and t = {}", w[0].t, w[1].t),
                    step - allowed,
                ));
            }
        }
        Ok(())
    }
}

/// `(v2*, −v1*)`-style orthogonal unit vector.
fn perp(v: [C; 2]) -> [C; 2] {
    [-v[1].conj(), v[0].conj()]
}

fn normalized(v: [C; 2]) -> [C; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Range and initial unit vectors `u`, `v` with `W = u v*`.
fn factor(w: &Mat2) -> ([C; 2], [C; 2]) {
    let p = w.adjoint() * *w;
    let col = if p.column(0)[0].norm() >= p.column(1)[1].norm() { 0 } else { 1 };
    let v = normalized(p.column(col));
    (w.apply(v), v)
}

/// The partial isometry from `ker W` onto `(ran W)^⊥`, with its first
/// entry (row-major) of modulus above `tol` made real and positive.
pub fn complement_isometry(w: &Mat2, tol: f64) -> Result<Mat2> {
    let defect = w.rank_one_defect();
    if !w.is_finite() || defect > tol {
        return Err(numerical("not a rank-one partial isometry", defect));
    }
    let (u, v) = factor(w);
    let c = Mat2::outer(perp(u), perp(v));
    let lead = c
        .0
        .iter()
        .flatten()
        .find(|z| z.norm() > tol)
        .copied()
        .expect("a rank-one partial isometry has a nonzero entry");
    Ok(c.scale(lead.conj() / lead.norm()))
}

/// Multiplies `next` by the unit scalar bringing it closest to `prev`.
fn align(next: Mat2, prev: &Mat2) -> Mat2 {
    let z = next.inner(prev);
    if z.norm() == 0.0 {
        next
    } else {
        next.scale(z / z.norm())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitaryPath {
    pub samples: Vec<Sample>,
    /// Phase constant used after the jump.
    pub c: [f64; 2],
    /// `‖W^⊥(t_jump) − c·(W − W¹)(t_jump⁺)‖` at the first sample after the jump.
    pub residual: f64,
}

/// `U = W + W^⊥` up to the jump, `U = W¹ + c(W − W¹)` after it, where
/// `W¹(t) = W(t)·P` continues `W` on its initial projection `P` at the jump
/// and `|c| = 1` matches `W^⊥` at the jump to the one-sided limit of `W − W¹`.
pub fn patch_at_singularity(path: &IsometryPath) -> Result<UnitaryPath> {
    path.check()?;
    let tol = path.tol;
    let j = path.last_before_jump();
    let mut samples = Vec::with_capacity(path.samples.len());
    let mut perp_prev: Option<Mat2> = None;
    for s in &path.samples[..=j] {
        let fresh = complement_isometry(&s.w, tol)?;
        let perp = match &perp_prev {
            Some(p) => align(fresh, p),
            None => fresh,
        };
        samples.push(Sample {
            t: s.t,
            w: s.w + perp,
        });
        perp_prev = Some(perp);
    }
    let w_jump = path.samples[j].w;
    let proj = w_jump.adjoint() * w_jump;
    let perp_jump = perp_prev.expect("at least one sample before the jump");

    let mut c = C::new(1.0, 0.0);
    let mut residual = 0.0;
    if let Some(first) = path.samples.get(j + 1) {
        let d = first.w - first.w * proj;
        let z = d.inner(&perp_jump);
        if z.norm() <= tol {
            return Err(numerical("limit of W − W¹ at the jump vanishes", z.norm()));
        }
        c = z / z.norm();
        residual = (perp_jump - d.scale(c)).norm();
        let h = first.t - path.samples[j].t;
        let allowed = path.lipschitz * h + tol;
        if residual > allowed {
            return Err(numerical("phase alignment at the jump", residual));
        }
    }
    for s in &path.samples[j + 1..] {
        let w1 = s.w * proj;
        samples.push(Sample {
            t: s.t,
            w: w1 + (s.w - w1).scale(c),
        });
    }
    Ok(UnitaryPath {
        samples,
        c: [c.re, c.im],
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathReport {
    pub pass: bool,
    /// `max ‖U*U − I‖`.
    pub unitarity: f64,
    /// `max ‖U(t_{i+1}) − U(t_i)‖`.
    pub max_step: f64,
    /// `max (‖U(t_{i+1}) − U(t_i)‖ − L·h)`; must not exceed `tol`.
    pub continuity_excess: f64,
    /// Left end of the worst step.
    pub worst_step_at: f64,
    /// `max ‖(U − W)·P_init‖`, with `P_init = W*W` up to the jump and the
    /// initial projection at the jump after it.
    pub action: f64,
}

pub fn validate_unitary_path(u: &[Sample], path: &IsometryPath) -> Result<PathReport> {
    if u.len() != path.samples.len() || u.iter().zip(&path.samples).any(|(a, b)| a.t != b.t) {
        return Err(Error::InvalidParameter("unitary path and isometry path grids differ".into()));
    }
    let j = path.last_before_jump();
    let w_jump = path.samples[j].w;
    let proj_jump = w_jump.adjoint() * w_jump;
    let unitarity = u.iter().map(|s| s.w.unitarity_defect()).fold(0.0, f64::max);
    let (mut max_step, mut continuity_excess, mut worst_step_at) = (0.0, f64::NEG_INFINITY, 0.0);
    for w in u.windows(2) {
        let step = (w[1].w - w[0].w).norm();
        let excess = step - path.lipschitz * (w[1].t - w[0].t);
        max_step = f64::max(max_step, step);
        if excess > continuity_excess {
            continuity_excess = excess;
            worst_step_at = w[0].t;
        }
    }
    let action = u
        .iter()
        .zip(&path.samples)
        .enumerate()
        .map(|(i, (us, ws))| {
            let p = if i <= j { ws.w.adjoint() * ws.w } else { proj_jump };
            ((us.w - ws.w) * p).norm()
        })
        .fold(0.0, f64::max);
    let tol = path.tol;
    Ok(PathReport {
        pass: unitarity <= tol && continuity_excess <= tol && action <= tol,
        unitarity,
        max_step,
        continuity_excess,
        worst_step_at,
        action,
    })
}
