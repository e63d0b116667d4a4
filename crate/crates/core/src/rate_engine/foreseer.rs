//! Foreseer lower-bound objective for caller-supplied distributions.
//!
//! Per route the summand is
//! `[H(V) - max_q H(X_a | Y) - H_q(d_j) log2 q]^+` where the maximum runs
//! over the supplied adversary family, `q = |X|`, and
//! `d_j = 2 s(j) D_j` (Hamming) or `s(j) D_j` (erasure). No search over
//! `p(x)` or `p(v|x)` is performed.

use serde::{Deserialize, Serialize};

use super::{finish, PlacementRate, RateReport};
use crate::channel_model::{DistortionMeasure, NetworkSpec, RouteSpec};
use crate::error::{Error, Result};
use crate::info_math::{entropy, hq, CondPmf, Pmf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForeseerBoundInputs {
    /// Input law per route.
    pub input: Vec<Pmf>,
    /// Auxiliary law `x -> v` per route; `v` ranges over the adversary alphabet.
    pub auxiliary: Vec<CondPmf>,
    /// Adversary laws `x -> x_a` per route, used when the route is attacked.
    pub adversaries: Vec<Vec<CondPmf>>,
}

const SLACK: f64 = 1e-12;

fn expected_distortion(p: &Pmf, law: &CondPmf, cost: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (x, px) in p.probs().iter().enumerate() {
        for (a, w) in law.rows()[x].probs().iter().enumerate() {
            if px * w > 0.0 {
                total += px * w * cost[x][a];
            }
        }
    }
    total
}

/// `H(X_a | Y)` when `X ~ p`, `X_a ~ adversary(x)`, `Y ~ channel(x_a)`.
fn equivocation(p: &Pmf, adversary: &CondPmf, channel: &CondPmf) -> Result<f64> {
    let xa = adversary.output_pmf(p)?;
    let joint = channel.joint(&xa)?;
    Ok((joint.entropy() - entropy(&joint.second_marginal())).max(0.0))
}

struct RouteData {
    law: CondPmf,
    cost: Vec<Vec<f64>>,
    q: usize,
    ball_factor: f64,
}

fn route_data(j: usize, route: &RouteSpec) -> Result<RouteData> {
    let not_applicable = |reason: String| Error::NotApplicable {
        evaluator: "foreseer_bound_objective",
        reason,
    };
    let law = route
        .law()
        .ok_or_else(|| not_applicable(format!("route {j} is not discrete")))?;
    let measure = route.measure();
    let ball_factor = match measure {
        DistortionMeasure::Hamming { .. } => 2.0,
        DistortionMeasure::Erasure { .. } => 1.0,
        DistortionMeasure::SquaredError => {
            return Err(not_applicable(format!("route {j} uses squared error")));
        }
    };
    Ok(RouteData {
        law,
        cost: measure.matrix().expect("discrete measure"),
        q: measure.input_alphabet().expect("discrete measure"),
        ball_factor,
    })
}

/// Lower-bound objective minimized over placements.
pub fn foreseer_bound_objective(inputs: &ForeseerBoundInputs, spec: &NetworkSpec) -> Result<RateReport> {
    let n_r = spec.n_r();
    for (what, len) in [
        ("input", inputs.input.len()),
        ("auxiliary", inputs.auxiliary.len()),
        ("adversaries", inputs.adversaries.len()),
    ] {
        if len != n_r {
            return Err(Error::AlphabetMismatch(format!(
                "{what} has {len} entries for {n_r} routes"
            )));
        }
    }
    let data = spec
        .routes()
        .iter()
        .enumerate()
        .map(|(j, r)| route_data(j, r))
        .collect::<Result<Vec<_>>>()?;

    // per-route terms for s(j) = 0 and s(j) = 1
    let mut terms = Vec::with_capacity(n_r);
    for (j, d) in data.iter().enumerate() {
        let p = &inputs.input[j];
        let aux = &inputs.auxiliary[j];
        if p.len() != d.q || aux.inputs() != d.q || aux.outputs() != d.cost[0].len() {
            return Err(Error::AlphabetMismatch(format!(
                "route {j}: input/auxiliary alphabets do not match the route"
            )));
        }
        let v_entropy = aux.output_pmf(p)?.entropy();
        let v_distortion = expected_distortion(p, aux, &d.cost);
        let limit = spec.routes()[j].distortion_limit;
        let identity = CondPmf::new(
            (0..d.q)
                .map(|x| (0..d.cost[0].len()).map(|a| if a == x { 1.0 } else { 0.0 }).collect())
                .collect(),
        )?;
        let mut pair = [0.0; 2];
        for attacked in [false, true] {
            let radius = if attacked { d.ball_factor * limit } else { 0.0 };
            if v_distortion > radius + SLACK {
                return Err(Error::ConstraintViolation(format!(
                    "route {j}: E[d(V, X)] = {v_distortion} exceeds d = {radius} \
                     (attacked = {attacked})"
                )));
            }
            let family: Vec<&CondPmf> = if attacked {
                inputs.adversaries[j].iter().collect()
            } else {
                vec![&identity]
            };
            let mut worst = if family.is_empty() {
                equivocation(p, &identity, &d.law)?
            } else {
                0.0
            };
            for adv in family {
                if adv.inputs() != d.q || adv.outputs() != d.law.inputs() {
                    return Err(Error::AlphabetMismatch(format!(
                        "route {j}: adversary law has shape {}x{}",
                        adv.inputs(),
                        adv.outputs()
                    )));
                }
                let used = expected_distortion(p, adv, &d.cost);
                if attacked && used > limit + SLACK {
                    return Err(Error::ConstraintViolation(format!(
                        "route {j}: adversary distortion {used} exceeds D = {limit}"
                    )));
                }
                worst = worst.max(equivocation(p, adv, &d.law)?);
            }
            let ball = if radius > 0.0 {
                hq(radius.min(1.0), d.q as u64) * (d.q as f64).log2()
            } else {
                0.0
            };
            pair[attacked as usize] = (v_entropy - worst - ball).max(0.0);
        }
        terms.push(pair);
    }

    let per_placement = spec
        .placements()?
        .into_iter()
        .map(|s| {
            let route_terms: Vec<f64> = (0..n_r).map(|j| terms[j][s.attacked(j) as usize]).collect();
            PlacementRate {
                value: route_terms.iter().sum(),
                placement: s,
                route_terms,
            }
        })
        .collect();
    Ok(finish(
        "foreseer_bound_objective",
        "foreseer lower-bound objective for supplied distributions",
        per_placement,
    ))
}
