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

//! Exact calculus for the finite data attached to continuous-trace building
//! blocks with spectrum `[0,1]`.
//!
//! Everything except [`unitary`] works over arbitrary-precision rationals:
//!
//! * [`pwcalc`]: piecewise-linear and piecewise-constant functions on `[0,1]`,
//!   composition, pointwise comparison with witnesses, weighted sup norms.
//! * [`blocks`]: dimension functions and nested-open-set presentations.
//! * [`patterns`]: eigenvalue-pattern maps, gaps, and intertwining chains.
//! * [`existence`]: the eigenfunction perturbation with a checkable certificate,
//!   and the exact-versus-relaxed hypothesis counterexample.
//! * [`invariant`]: trace norm maps on finite simplices, dimension ranges and the
//!   AI criterion.
//! * [`unitary`]: floating-point patching of a rank-one partial isometry path
//!   across a rank jump.

// Errors carry exact witnesses, which makes them large.
#![allow(clippy::result_large_err)]

pub mod blocks;
mod error;
pub mod existence;
pub mod invariant;
pub mod patterns;
pub mod pwcalc;
pub mod serial;
pub mod unitary;

pub use error::{Error, Result};
pub use pwcalc::{rat, Rational};
