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


use crate::input::{parse, rational_literal, Lit};
use ctrace_core::blocks::{self, DimensionFunction, NestedPresentation};
use ctrace_core::existence::{self, PerturbationCertificate};
use ctrace_core::invariant::{self, ExtRational, GroupKind, GroupModel, InvariantModel, TraceNormMap};
use ctrace_core::patterns::{self, Chain, EigenPattern};
use ctrace_core::pwcalc::{self, Function, Piecewise, PlFunction, StepFunction, Weight};
use ctrace_core::serial::{to_value, Rat};
use ctrace_core::unitary::{self, IsometryPath, Sample};
use ctrace_core::{Error, Rational, Result};
use serde::Deserialize;
use serde_json::{json, Value};

pub type Handler = fn(Value) -> Result<(Value, bool)>;

fn done(v: Value) -> Result<(Value, bool)> {
    Ok((v, true))
}

fn q(r: &Rational) -> Value {
    to_value(&Rat(r.clone()))
}

fn unit_weight(w: Option<Weight>) -> Weight {
    w.unwrap_or_else(Weight::unit)
}

pub fn pw_eval(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        f: Function,
        t: Lit,
    }
    let i: In = parse(p)?;
    done(json!({ "t": q(&i.t.0), "value": q(&i.f.eval(&i.t.0)?) }))
}

pub fn pw_le(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        f: Function,
        g: Function,
        #[serde(default)]
        strict: bool,
    }
    let i: In = parse(p)?;
    let c = pwcalc::le_pointwise(&i.f, &i.g, i.strict);
    Ok((to_value(&c), c.holds))
}

pub fn pw_norm(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        f: PlFunction,
        w: Option<Weight>,
    }
    let i: In = parse(p)?;
    done(to_value(&pwcalc::weighted_sup_norm(&i.f, &unit_weight(i.w))))
}

pub fn block_validate(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        d: StepFunction,
    }
    let i: In = parse(p)?;
    let v = blocks::validate_special(&i.d);
    Ok((to_value(&v), v.valid))
}

pub fn block_from_nested(p: Value) -> Result<(Value, bool)> {
    let n: NestedPresentation = parse(p)?;
    done(json!({ "d": to_value(&blocks::dim_from_nested(&n)?) }))
}

pub fn block_to_nested(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        d: DimensionFunction,
    }
    let i: In = parse(p)?;
    done(to_value(&blocks::nested_from_dim(&i.d)))
}

pub fn pattern_apply(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        pattern: EigenPattern,
        f: PlFunction,
        #[serde(default)]
        normalized: bool,
    }
    let i: In = parse(p)?;
    done(json!({ "result": to_value(&patterns::apply_pattern(&i.pattern, &i.f, i.normalized)) }))
}

pub fn pattern_push(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        pattern: EigenPattern,
        d: DimensionFunction,
    }
    let i: In = parse(p)?;
    done(json!({ "result": to_value(&patterns::push_dimension(&i.pattern, &i.d)) }))
}

pub fn pattern_compat(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        pattern: EigenPattern,
        f: PlFunction,
        d_b: DimensionFunction,
        slack: Option<Lit>,
    }
    let i: In = parse(p)?;
    let slack = i.slack.map_or_else(Rational::default, |l| l.0);
    let c = patterns::check_compat(&i.pattern, &i.f, &i.d_b, &slack)?;
    Ok((to_value(&c), c.holds))
}

pub fn pattern_density(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        pattern: EigenPattern,
        d: usize,
        delta: Lit,
    }
    let i: In = parse(p)?;
    let v = patterns::density_check(&i.pattern, i.d, &i.delta.0)?;
    Ok((to_value(&v), v.holds))
}

pub fn pattern_gap(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        pattern: EigenPattern,
        d_src: DimensionFunction,
        d_tgt: DimensionFunction,
    }
    let i: In = parse(p)?;
    let g = patterns::compute_gap(&i.pattern, &i.d_src, &i.d_tgt);
    Ok((to_value(&g), g.positive))
}

pub fn pattern_chain(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        chain: Chain,
        f: PlFunction,
        delta_1: Lit,
        eps_n: Lit,
    }
    let i: In = parse(p)?;
    let r = patterns::verify_chain(&i.chain, &i.f, &i.delta_1.0, &i.eps_n.0)?;
    Ok((to_value(&r), r.verified))
}

pub fn pattern_uniqhyp(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        phi: EigenPattern,
        psi: EigenPattern,
        d: usize,
        delta: Lit,
        w_dom: Option<Weight>,
        w_cod: Option<Weight>,
    }
    let i: In = parse(p)?;
    let r = patterns::uniqueness_hypothesis_check(
        &i.phi,
        &i.psi,
        i.d,
        &i.delta.0,
        &unit_weight(i.w_dom),
        &unit_weight(i.w_cod),
    )?;
    Ok((to_value(&r), r.holds))
}

pub fn exist_fprime(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        d: DimensionFunction,
        delta: Lit,
    }
    let i: In = parse(p)?;
    done(json!({ "f_prime": to_value(&existence::make_underapprox(&i.d, &i.delta.0)?) }))
}

pub fn exist_perturb(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        d_a: DimensionFunction,
        f_prime: Option<PlFunction>,
        pattern: EigenPattern,
        d_b: DimensionFunction,
        /// Defaults to `ε / (2M²)`.
        delta: Option<Lit>,
        #[serde(default)]
        family: Vec<PlFunction>,
        eps: Lit,
        w_dom: Option<Weight>,
        w_cod: Option<Weight>,
    }
    let i: In = parse(p)?;
    let delta = match i.delta {
        Some(d) => d.0,
        None => {
            let m = u32::try_from(i.pattern.multiplicity())
                .map_err(|_| Error::InvalidParameter("multiplicity too large".into()))?;
            existence::choose_delta(&i.eps.0, m)?
        }
    };
    let f_prime = match i.f_prime {
        Some(f) => f,
        None => existence::make_underapprox(&i.d_a, &delta)?,
    };
    let cert = existence::perturb_pattern(
        &i.d_a,
        &f_prime,
        &i.pattern,
        &i.d_b,
        &delta,
        &i.family,
        &i.eps.0,
        &unit_weight(i.w_dom),
        &unit_weight(i.w_cod),
    )?;
    done(to_value(&cert))
}

pub fn exist_verify(p: Value) -> Result<(Value, bool)> {
    let cert: PerturbationCertificate = match p.get("certificate") {
        Some(c) => parse(c.clone())?,
        None => parse(p)?,
    };
    let v = existence::verify_certificate(&cert);
    Ok((to_value(&v), v.valid))
}

pub fn exist_counterexample(delta: &str, eps0: &str) -> Result<(Value, bool)> {
    let r = existence::reproduce_counterexample(&rational_literal(delta)?, &rational_literal(eps0)?)?;
    let holds = r.hypothesis && r.infeasibility.holds;
    Ok((to_value(&r), holds))
}

pub fn invariant_eval(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        f: TraceNormMap,
        s: Vec<Lit>,
    }
    let i: In = parse(p)?;
    let s: Vec<Rational> = i.s.into_iter().map(|l| l.0).collect();
    done(json!({ "value": to_value(&invariant::trace_norm_eval(&i.f, &s)?) }))
}

#[derive(Deserialize)]
struct WithModel<T> {
    #[serde(flatten)]
    model: InvariantModel,
    #[serde(flatten)]
    extra: T,
}

pub fn invariant_range(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct Extra {
        x: Vec<Lit>,
        #[serde(default)]
        literal: bool,
    }
    let i: WithModel<Extra> = parse(p)?;
    let (g, s, f) = i.model.parts()?;
    let x: Vec<Rational> = i.extra.x.into_iter().map(|l| l.0).collect();
    let v = invariant::dimension_range_membership(&g, &s, &f, &x, i.extra.literal)?;
    Ok((to_value(&v), v.member))
}

pub fn invariant_ai(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct Extra {
        #[serde(default)]
        literal: bool,
    }
    let i: WithModel<Extra> = parse(p)?;
    let (g, s, f) = i.model.parts()?;
    let v = invariant::ai_criterion(&g, &s, &f, i.extra.literal)?;
    Ok((to_value(&v), v.ai))
}

pub fn invariant_decompose(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        f: TraceNormMap,
        caps: Vec<Lit>,
    }
    let i: In = parse(p)?;
    let caps: Vec<Rational> = i.caps.into_iter().map(|l| l.0).collect();
    done(to_value(&invariant::lsc_decompose(&i.f, &caps)?))
}

/// Reports every point; rows for a plot file are returned under `"plot"`.
pub fn invariant_classify(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        points: Vec<(ExtRational, ExtRational)>,
        group: GroupKind,
        #[serde(default, with = "ctrace_core::serial::rational_matrix")]
        pairing: Vec<Vec<Rational>>,
    }
    let i: In = parse(p)?;
    let g = if i.pairing.is_empty() {
        GroupModel::diagonal(i.group, 2)?
    } else {
        GroupModel::new(i.group, i.pairing)?
    };
    let classes = i
        .points
        .iter()
        .map(|(x, y)| invariant::classify_point(x, y, &g))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<String> = classes.iter().map(|c| c.plot_row()).collect();
    done(json!({ "points": to_value(&classes), "plot": rows }))
}

pub fn unitary_patch(p: Value) -> Result<(Value, bool)> {
    let path: IsometryPath = parse(p)?;
    done(to_value(&unitary::patch_at_singularity(&path)?))
}

pub fn unitary_validate(p: Value) -> Result<(Value, bool)> {
    #[derive(Deserialize)]
    struct In {
        path: IsometryPath,
        unitary: Vec<Sample>,
    }
    let i: In = parse(p)?;
    let r = unitary::validate_unitary_path(&i.unitary, &i.path)?;
    Ok((to_value(&r), r.pass))
}

