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


use ctrace_core::pwcalc::parse_rational;
use ctrace_core::{Error, Rational, Result};
use serde::{de, Deserialize, Deserializer};
use serde_json::{json, Value};
use std::io::{Read, Write};
use std::path::Path;
use std::process::ExitCode;

/// Rational scalar given as a reduced `[num, den]` pair or an `"a/b"` string.
#[derive(Clone, Debug)]
pub struct Lit(pub Rational);

impl<'de> Deserialize<'de> for Lit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Pair(ctrace_core::serial::Rat),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => parse_rational(&s).map(Lit).map_err(de::Error::custom),
            Repr::Pair(r) => Ok(Lit(r.0)),
        }
    }
}

pub fn parse<T: for<'de> Deserialize<'de>>(payload: Value) -> Result<T> {
    serde_json::from_value(payload).map_err(|e| Error::Schema(e.to_string()))
}

pub fn rational_literal(s: &str) -> Result<Rational> {
    parse_rational(s)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ToleranceExceeded { .. } => 1,
        Error::Infeasible { .. } => 3,
        Error::NotDecidable(_) => 4,
        _ => 2,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::OutOfDomain(_) => "out_of_domain",
        Error::Malformed(_) => "malformed",
        Error::Empty(_) => "empty",
        Error::NotIntoUnit { .. } => "not_into_unit",
        Error::NonPositiveWeight(_) => "non_positive_weight",
        Error::NotLsc(_) => "not_lsc",
        Error::NotDimension(_) => "not_dimension",
        Error::NotNested { .. } => "not_nested",
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::PreconditionFailed { .. } => "precondition_failed",
        Error::Infeasible { .. } => "infeasible",
        Error::ToleranceExceeded { .. } => "tolerance_exceeded",
        Error::NotDecidable(_) => "not_decidable",
        Error::Numerical { .. } => "numerical",
        Error::Schema(_) => "schema",
    }
}

fn error_witness(e: &Error) -> Option<Value> {
    let r = |q: &Rational| ctrace_core::serial::to_value(&ctrace_core::serial::Rat(q.clone()));
    match e {
        Error::OutOfDomain(t) | Error::NonPositiveWeight(t) | Error::NotLsc(t) => Some(r(t)),
        Error::NotIntoUnit { t, .. } => Some(r(t)),
        Error::NotNested { witness, .. } | Error::Infeasible { witness, .. } => Some(r(witness)),
        Error::PreconditionFailed { witness, .. } => witness.as_ref().map(r),
        Error::ToleranceExceeded { index, .. } => Some(json!(index)),
        Error::Numerical { residual, .. } => Some(json!(residual)),
        _ => None,
    }
}

fn error_value(e: &Error) -> Value {
    let mut v = json!({ "error": error_kind(e), "message": e.to_string() });
    if let Some(w) = error_witness(e) {
        v["witness"] = w;
    }
    if let Error::ToleranceExceeded { deviation, bound, .. } = e {
        v["deviation"] = ctrace_core::serial::to_value(&ctrace_core::serial::Rat(deviation.clone()));
        v["bound"] = ctrace_core::serial::to_value(&ctrace_core::serial::Rat(bound.clone()));
    }
    v
}

/// Report plus exit code.
pub struct Outcome {
    pub report: Value,
    pub code: u8,
}

impl Outcome {
    pub fn from_result(r: Result<(Value, bool)>) -> Self {
        match r {
            Ok((report, holds)) => Outcome {
                report,
                code: if holds { 0 } else { 1 },
            },
            Err(e) => {
                eprintln!("ctrace: {e}");
                Outcome {
                    report: error_value(&e),
                    code: exit_code(&e),
                }
            }
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<Value> {
    let text = match path {
        Some(p) if p != Path::new("-") => std::fs::read_to_string(p)
            .map_err(|e| Error::Schema(format!("cannot read {}: {e}", p.display())))?,
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::Schema(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("invalid JSON: {e}")))
}

/// Strips a `{"command": …, "payload": …}` envelope, checking the command.
fn unwrap_envelope(name: &str, v: Value) -> Result<Value> {
    match v {
        Value::Object(mut m) if m.contains_key("command") && m.contains_key("payload") => {
            let command = m.remove("command").expect("checked");
            if command.as_str() != Some(name) {
                return Err(Error::Schema(format!(
                    "envelope command {command} does not match `{name}`"
                )));
            }
            Ok(m.remove("payload").expect("checked"))
        }
        other => Ok(other),
    }
}

/// Runs `handler` on the payload, or on each element of an array payload
/// (independent instances, e.g. the intervals of a disjoint union), in
/// which case the reports are collected in order and the exit code is the
/// largest one.
pub fn run_batch(
    name: &str,
    path: Option<&Path>,
    mut handler: impl FnMut(Value) -> Result<(Value, bool)>,
) -> Outcome {
    let payload = match read_input(path).and_then(|v| unwrap_envelope(name, v)) {
        Ok(p) => p,
        Err(e) => return Outcome::from_result(Err(e)),
    };
    match payload {
        Value::Array(items) => {
            let outcomes: Vec<Outcome> = items
                .into_iter()
                .map(|item| Outcome::from_result(unwrap_envelope(name, item).and_then(&mut handler)))
                .collect();
            Outcome {
                code: outcomes.iter().map(|o| o.code).max().unwrap_or(0),
                report: Value::Array(outcomes.into_iter().map(|o| o.report).collect()),
            }
        }
        single => Outcome::from_result(handler(single)),
    }
}

pub fn finish(o: Outcome) -> ExitCode {
    let text = serde_json::to_string_pretty(&o.report).expect("JSON values serialize");
    // A closed reader (e.g. `| head`) is not an error of the check itself.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(o.code)
}

/// Writes the `"plot"` rows of a classification report (or of each report
/// in a batch) to `path`, one `x y class` row per line.
pub fn write_plot(path: &Path, report: &Value) -> std::io::Result<()> {
    let reports: Vec<&Value> = match report {
        Value::Array(items) => items.iter().collect(),
        single => vec![single],
    };
    let mut text = String::new();
    for row in reports
        .iter()
        .filter_map(|r| r.get("plot").and_then(Value::as_array))
        .flatten()
        .filter_map(Value::as_str)
    {
        text.push_str(row);
        text.push('\n');
    }
    std::fs::write(path, text)
}
