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


//! `ctrace`: reads a JSON payload (file or stdin), runs one check, prints a
//! JSON report, and exits with
//! 0 = holds, 1 = refuted (witness in the report), 2 = bad input or failed
//! precondition, 3 = infeasible, 4 = not decidable.

#![allow(clippy::result_large_err)]

mod commands;
mod input;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ctrace", version, about = "Exact checks for dimension functions, eigenvalue patterns and trace invariants")]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand)]
enum Group {
    /// Piecewise-linear and step functions on [0,1].
    #[command(subcommand)]
    Pw(PwCmd),
    /// Dimension functions of building blocks.
    #[command(subcommand)]
    Block(BlockCmd),
    /// Eigenvalue patterns.
    #[command(subcommand)]
    Pattern(PatternCmd),
    /// Perturbation certificates and the slack counterexample.
    #[command(subcommand)]
    Exist(ExistCmd),
    /// Trace-norm maps and dimension ranges.
    #[command(subcommand)]
    Invariant(InvariantCmd),
    /// Unitary paths across a rank jump.
    #[command(subcommand)]
    Unitary(UnitaryCmd),
}

#[derive(Args, Clone)]
pub struct InputArg {
    /// JSON payload file; stdin when omitted or `-`.
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PwCmd {
    /// Value of `f` at `t`.
    Eval(InputArg),
    /// Pointwise `f ≤ g` (or `<`) with a witness.
    Le(InputArg),
    /// Weighted sup norm and where it is attained.
    Norm(InputArg),
}

#[derive(Subcommand)]
enum BlockCmd {
    /// Checks that a step function is a dimension function.
    Validate(InputArg),
    /// Dimension function of nested open sets.
    FromNested(InputArg),
    /// Nested open sets of a dimension function.
    ToNested(InputArg),
}

#[derive(Subcommand)]
enum PatternCmd {
    /// `Σ f∘λ_i`, optionally averaged.
    Apply(InputArg),
    /// `Σ d∘λ_i` for a dimension function `d`.
    Push(InputArg),
    /// `T(f) ≤ (1 + slack)·d_B`.
    Compat(InputArg),
    /// Eigenvalue density on `d` subintervals.
    Density(InputArg),
    /// Least margin between a pushed and a target dimension function.
    Gap(InputArg),
    /// Strict inequality chain of an intertwining.
    Chain(InputArg),
    /// Density plus test-ramp norm hypothesis for two patterns.
    Uniqhyp(InputArg),
}

#[derive(Subcommand)]
enum ExistCmd {
    /// Continuous under-approximation of a dimension function.
    Fprime(InputArg),
    /// Perturbed pattern with a certificate.
    Perturb(InputArg),
    /// Re-checks a certificate.
    Verify(InputArg),
    /// Reproduces the infeasible slack instance.
    Counterexample {
        /// Slack δ in (0,1), e.g. `1/10`.
        #[arg(long)]
        delta: String,
        /// Radius ε_0 in (0,1/4), e.g. `1/5`.
        #[arg(long)]
        eps0: String,
    },
}

#[derive(Subcommand)]
enum InvariantCmd {
    /// Trace-norm map at a point of the simplex.
    Eval(InputArg),
    /// Membership of a group element in the dimension range.
    Range(InputArg),
    /// Approximately-interval criterion.
    Ai(InputArg),
    /// Capped partial sums of a trace-norm map.
    Decompose(InputArg),
    /// Classifies points of the quadrant for plotting.
    Classify {
        #[command(flatten)]
        input: InputArg,
        /// Also write `x y class` rows to this file.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum UnitaryCmd {
    /// Unitary path agreeing with the isometries.
    Patch(InputArg),
    /// Defects of a unitary path against an isometry path.
    Validate(InputArg),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    use commands as c;
    let (name, input, handler): (&str, Option<InputArg>, c::Handler) = match cli.group {
        Group::Pw(PwCmd::Eval(i)) => ("pw eval", Some(i), c::pw_eval),
        Group::Pw(PwCmd::Le(i)) => ("pw le", Some(i), c::pw_le),
        Group::Pw(PwCmd::Norm(i)) => ("pw norm", Some(i), c::pw_norm),
        Group::Block(BlockCmd::Validate(i)) => ("block validate", Some(i), c::block_validate),
        Group::Block(BlockCmd::FromNested(i)) => ("block from-nested", Some(i), c::block_from_nested),
        Group::Block(BlockCmd::ToNested(i)) => ("block to-nested", Some(i), c::block_to_nested),
        Group::Pattern(PatternCmd::Apply(i)) => ("pattern apply", Some(i), c::pattern_apply),
        Group::Pattern(PatternCmd::Push(i)) => ("pattern push", Some(i), c::pattern_push),
        Group::Pattern(PatternCmd::Compat(i)) => ("pattern compat", Some(i), c::pattern_compat),
        Group::Pattern(PatternCmd::Density(i)) => ("pattern density", Some(i), c::pattern_density),
        Group::Pattern(PatternCmd::Gap(i)) => ("pattern gap", Some(i), c::pattern_gap),
        Group::Pattern(PatternCmd::Chain(i)) => ("pattern chain", Some(i), c::pattern_chain),
        Group::Pattern(PatternCmd::Uniqhyp(i)) => ("pattern uniqhyp", Some(i), c::pattern_uniqhyp),
        Group::Exist(ExistCmd::Fprime(i)) => ("exist fprime", Some(i), c::exist_fprime),
        Group::Exist(ExistCmd::Perturb(i)) => ("exist perturb", Some(i), c::exist_perturb),
        Group::Exist(ExistCmd::Verify(i)) => ("exist verify", Some(i), c::exist_verify),
        Group::Exist(ExistCmd::Counterexample { delta, eps0 }) => {
            return input::finish(input::Outcome::from_result(c::exist_counterexample(&delta, &eps0)));
        }
        Group::Invariant(InvariantCmd::Eval(i)) => ("invariant eval", Some(i), c::invariant_eval),
        Group::Invariant(InvariantCmd::Range(i)) => ("invariant range", Some(i), c::invariant_range),
        Group::Invariant(InvariantCmd::Ai(i)) => ("invariant ai", Some(i), c::invariant_ai),
        Group::Invariant(InvariantCmd::Decompose(i)) => {
            ("invariant decompose", Some(i), c::invariant_decompose)
        }
        Group::Invariant(InvariantCmd::Classify { input, plot }) => {
            let outcome = input::run_batch("invariant classify", input.input.as_deref(), c::invariant_classify);
            if let Some(plot) = plot {
                if let Err(e) = input::write_plot(&plot, &outcome.report) {
                    eprintln!("ctrace: cannot write {}: {e}", plot.display());
                    return ExitCode::from(2);
                }
            }
            return input::finish(outcome);
        }
        Group::Unitary(UnitaryCmd::Patch(i)) => ("unitary patch", Some(i), c::unitary_patch),
        Group::Unitary(UnitaryCmd::Validate(i)) => ("unitary validate", Some(i), c::unitary_validate),
    };
    let path = input.and_then(|i| i.input);
    input::finish(input::run_batch(name, path.as_deref(), handler))
}
