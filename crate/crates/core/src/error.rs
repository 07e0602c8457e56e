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

use crate::Rational;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {0} lies outside [0,1]")]
    OutOfDomain(Rational),

    #[error("malformed function: {0}")]
    Malformed(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("function leaves [0,1] at t = {t} (value {value})")]
    NotIntoUnit { t: Rational, value: Rational },

    #[error("weight is not strictly positive at t = {0}")]
    NonPositiveWeight(Rational),

    #[error("not lower semicontinuous at t = {0}")]
    NotLsc(Rational),

    #[error("not a dimension function: {0}")]
    NotDimension(String),

    #[error("open sets are not nested: A_{index} is not contained in its predecessor (witness t = {witness})")]
    NotNested { index: usize, witness: Rational },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition failed: {what}")]
    PreconditionFailed {
        what: String,
        witness: Option<Rational>,
    },

    #[error("infeasible: {what} (witness t = {witness})")]
    Infeasible { what: String, witness: Rational },

    #[error("deviation bound exceeded for element {index}: {deviation} > {bound}")]
    ToleranceExceeded {
        index: usize,
        deviation: Rational,
        bound: Rational,
    },

    #[error("not decidable in closed form: {0}")]
    NotDecidable(String),

    #[error("numerical check failed: {what} (residual {residual:e})")]
    Numerical { what: String, residual: f64 },

    #[error("schema error: {0}")]
    Schema(String),
}
