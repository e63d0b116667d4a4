//! Concrete adversaries: the worst-case memoryless laws for binary
//! replacement, binary erasure and Gaussian attacks, plus codeword-aware
//! (foreseer) attacks. Every emitted block respects the hard budget
//! `floor(n D)` (discrete) or `D` (squared error).

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channel_model::{
    check_budget, check_budget_real, hard_budget, sample_index, ChannelKind, DistortionMeasure,
    RouteSpec, Symbol,
};
use crate::code_lab::{erasure_decode, min_distance_decode, ErasureDecoding, LinearCode};
use crate::error::{check_probability, Error, Result};
use crate::info_math::{CondPmf, Pmf};
use crate::rate_engine::inner_inf_mi;

/// Upper limit on candidate blocks for exhaustive foreseer search.
pub const MAX_EXHAUSTIVE: u128 = 1_000_000;

/// Forward law `x -> x_a` of the backward cascade `X = X_a xor Z'`,
/// `Z' ~ Bern(N')`, `N' = min(D, 1-D)`, with `Pr(X = 1) = p`.
/// The route noise `N` only enters through validation.
pub fn worst_memoryless_replacement(noise: f64, distortion: f64, p: f64) -> Result<CondPmf> {
    check_probability("N", noise)?;
    check_probability("D", distortion)?;
    check_probability("P", p)?;
    let n_prime = distortion.min(1.0 - distortion);
    if p < n_prime || p > 1.0 - n_prime {
        return Err(Error::Infeasible(format!(
            "input bias P = {p} must lie in [N', 1 - N'] with N' = {n_prime}"
        )));
    }
    if n_prime >= 0.5 {
        // X_a independent of X
        return CondPmf::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
    }
    let pi = (p - n_prime) / (1.0 - 2.0 * n_prime);
    // Bayes: p(x_a | x) = p(x | x_a) p(x_a) / p(x)
    let joint = |xa: usize, x: usize| {
        let pxa = if xa == 1 { pi } else { 1.0 - pi };
        let flip = if xa == x { 1.0 - n_prime } else { n_prime };
        pxa * flip
    };
    let rows = (0..2)
        .map(|x| {
            let px = if x == 1 { p } else { 1.0 - p };
            if px == 0.0 {
                // unreachable input: keep the symbol
                (0..2).map(|xa| (xa == x) as u8 as f64).collect()
            } else {
                (0..2).map(|xa| joint(xa, x) / px).collect()
            }
        })
        .collect();
    CondPmf::new(rows)
}

/// Erases each symbol independently with probability `D`.
pub fn worst_memoryless_erasure(distortion: f64) -> Result<CondPmf> {
    check_probability("D", distortion)?;
    let d = distortion;
    CondPmf::new(vec![vec![1.0 - d, 0.0, d], vec![0.0, 1.0 - d, d]])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianAttack {
    pub gain: f64,
    pub noise_variance: f64,
}

/// Forward law of the backward test channel `X = X_a + Z'`,
/// `X_a ~ N(0, P - D)`, `Z' ~ N(0, D)`: `X_a | x ~ N(a x, v)`.
pub fn worst_memoryless_gaussian(power: f64, distortion: f64) -> Result<GaussianAttack> {
    if !(distortion >= 0.0) || !(power > distortion) {
        return Err(Error::Infeasible(format!(
            "Gaussian attack needs P > D >= 0, got P = {power}, D = {distortion}"
        )));
    }
    Ok(GaussianAttack {
        gain: 1.0 - distortion / power,
        noise_variance: distortion * (power - distortion) / power,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Greedy,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyKind {
    Identity,
    MemorylessLaw { law: CondPmf },
    MemorylessGaussian(GaussianAttack),
    ForeseerReplacement { policy: Policy },
    ForeseerErasure { policy: Policy },
}

/// An adversary bound to one route: its kind, measure and budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryStrategy {
    pub kind: StrategyKind,
    pub measure: DistortionMeasure,
    pub budget: f64,
    pub attacked: bool,
}

impl AdversaryStrategy {
    pub fn new(kind: StrategyKind, measure: DistortionMeasure, budget: f64, attacked: bool) -> Result<Self> {
        if !(budget >= 0.0) {
            return Err(Error::OutOfRange {
                name: "budget",
                value: budget,
                range: ">= 0",
            });
        }
        match (&kind, &measure) {
            (StrategyKind::Identity, _) => {}
            (StrategyKind::MemorylessLaw { law }, m) => {
                let cost = m.matrix().ok_or_else(|| {
                    Error::AlphabetMismatch("memoryless law needs a discrete measure".into())
                })?;
                if law.inputs() != cost.len() || law.outputs() != cost[0].len() {
                    return Err(Error::AlphabetMismatch(format!(
                        "law is {}x{}, measure needs {}x{}",
                        law.inputs(),
                        law.outputs(),
                        cost.len(),
                        cost[0].len()
                    )));
                }
                for (x, row) in law.rows().iter().enumerate() {
                    for (a, p) in row.probs().iter().enumerate() {
                        if *p > 0.0 && cost[x][a].is_infinite() {
                            return Err(Error::ConstraintViolation(format!(
                                "law maps {x} to {a}, which the measure forbids"
                            )));
                        }
                    }
                }
            }
            (StrategyKind::MemorylessGaussian(_), DistortionMeasure::SquaredError) => {}
            (StrategyKind::ForeseerReplacement { .. }, DistortionMeasure::Hamming { .. }) => {}
            (StrategyKind::ForeseerErasure { .. }, DistortionMeasure::Erasure { .. }) => {}
            (k, m) => {
                return Err(Error::AlphabetMismatch(format!(
                    "strategy {k:?} does not fit measure {m:?}"
                )))
            }
        }
        Ok(AdversaryStrategy {
            kind,
            measure,
            budget,
            attacked,
        })
    }

    /// The kind actually applied: unattacked routes pass blocks unchanged.
    pub fn effective_kind(&self) -> &StrategyKind {
        if self.attacked {
            &self.kind
        } else {
            &StrategyKind::Identity
        }
    }

    /// Attacks a discrete block. Foreseer kinds need the code and the sent
    /// message index.
    pub fn attack<R: Rng + ?Sized>(
        &self,
        x: &[Symbol],
        codeword_of: Option<(&LinearCode, u64)>,
        rng: &mut R,
    ) -> Result<Vec<Symbol>> {
        let limit = hard_budget(x.len(), self.budget);
        let out = match self.effective_kind() {
            StrategyKind::Identity => x.to_vec(),
            StrategyKind::MemorylessLaw { law } => {
                let raw: Vec<Symbol> = x
                    .iter()
                    .map(|&s| {
                        let row = law.rows().get(s as usize).ok_or_else(|| {
                            Error::AlphabetMismatch(format!("symbol {s} outside the law"))
                        })?;
                        Ok(sample_index(row.probs(), rng) as Symbol)
                    })
                    .collect::<Result<_>>()?;
                clip_to_budget(x, raw, limit, rng)
            }
            StrategyKind::ForeseerReplacement { policy } => {
                let (code, sent) = codeword_of.ok_or_else(|| {
                    Error::AlphabetMismatch("foreseer attack needs the codebook".into())
                })?;
                foreseer_replacement_attack(code, sent, limit, *policy)?
            }
            StrategyKind::ForeseerErasure { policy } => {
                let (code, sent) = codeword_of.ok_or_else(|| {
                    Error::AlphabetMismatch("foreseer attack needs the codebook".into())
                })?;
                foreseer_erasure_attack(code, sent, limit, *policy)?
            }
            StrategyKind::MemorylessGaussian(_) => {
                return Err(Error::AlphabetMismatch(
                    "Gaussian strategy acts on real blocks; use attack_real".into(),
                ))
            }
        };
        if !check_budget(x, &out, &self.measure, self.budget) {
            return Err(Error::ConstraintViolation(format!(
                "emitted block exceeds budget {} (internal error)",
                self.budget
            )));
        }
        Ok(out)
    }

    /// Attacks a real-valued block under squared-error distortion. The
    /// deviation is scaled back onto the budget when a draw overshoots it.
    pub fn attack_real<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Result<Vec<f64>> {
        let out = match self.effective_kind() {
            StrategyKind::Identity => x.to_vec(),
            StrategyKind::MemorylessGaussian(g) => {
                let normal = Normal::new(0.0, g.noise_variance.sqrt())
                    .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
                let raw: Vec<f64> = x.iter().map(|v| g.gain * v + normal.sample(rng)).collect();
                let used = raw.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
                    / x.len().max(1) as f64;
                if used > self.budget {
                    let scale = (self.budget / used).sqrt() * (1.0 - 1e-12);
                    raw.iter().zip(x).map(|(a, b)| b + (a - b) * scale).collect()
                } else {
                    raw
                }
            }
            k => {
                return Err(Error::AlphabetMismatch(format!(
                    "strategy {k:?} acts on discrete blocks"
                )))
            }
        };
        if !check_budget_real(x, &out, self.budget) {
            return Err(Error::ConstraintViolation(format!(
                "emitted block exceeds budget {} (internal error)",
                self.budget
            )));
        }
        Ok(out)
    }
}

/// Reverts a uniformly random subset of modified positions so at most
/// `limit` remain.
fn clip_to_budget<R: Rng + ?Sized>(x: &[Symbol], mut out: Vec<Symbol>, limit: usize, rng: &mut R) -> Vec<Symbol> {
    let changed: Vec<usize> = (0..x.len()).filter(|&i| out[i] != x[i]).collect();
    if changed.len() > limit {
        for i in sample(rng, changed.len(), changed.len() - limit) {
            out[changed[i]] = x[changed[i]];
        }
    }
    out
}

/// Config-level adversary description, resolved against a route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategySpec {
    Identity,
    /// Worst memoryless law for the route's channel, uniform input.
    WorstMemoryless,
    MemorylessLaw { law: CondPmf },
    Foreseer { policy: Policy },
}

impl StrategySpec {
    pub fn resolve(&self, route: &RouteSpec, attacked: bool) -> Result<AdversaryStrategy> {
        let measure = route.measure();
        let d = route.distortion_limit;
        let kind = match self {
            StrategySpec::Identity => StrategyKind::Identity,
            StrategySpec::MemorylessLaw { law } => StrategyKind::MemorylessLaw { law: law.clone() },
            StrategySpec::WorstMemoryless => match &route.channel {
                ChannelKind::Bsc { crossover } => StrategyKind::MemorylessLaw {
                    law: worst_memoryless_replacement(*crossover, d, 0.5)?,
                },
                ChannelKind::Bec { .. } => StrategyKind::MemorylessLaw {
                    law: worst_memoryless_erasure(d)?,
                },
                ChannelKind::Awgn { .. } => StrategyKind::MemorylessGaussian(worst_memoryless_gaussian(
                    route.power.unwrap_or(0.0),
                    d,
                )?),
                ChannelKind::General { law, measure } => {
                    let q = measure.input_alphabet().unwrap_or(2);
                    let inner = inner_inf_mi(law, &Pmf::uniform(q)?, measure, d)?;
                    StrategyKind::MemorylessLaw {
                        law: inner.adversary,
                    }
                }
            },
            StrategySpec::Foreseer { policy } => match measure {
                DistortionMeasure::Hamming { .. } => StrategyKind::ForeseerReplacement { policy: *policy },
                DistortionMeasure::Erasure { .. } => StrategyKind::ForeseerErasure { policy: *policy },
                DistortionMeasure::SquaredError => {
                    return Err(Error::NotApplicable {
                        evaluator: "foreseer",
                        reason: "no foreseer attack for Gaussian routes".into(),
                    })
                }
            },
        };
        AdversaryStrategy::new(kind, measure, d, attacked)
    }
}

fn binom(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Visits every subset of `0..n` of size `w` in lexicographic order until
/// `f` returns true.
fn for_each_subset(n: usize, w: usize, f: &mut dyn FnMut(&[usize]) -> Result<bool>) -> Result<bool> {
    if w > n {
        return Ok(false);
    }
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        if f(&idx)? {
            return Ok(true);
        }
        let Some(i) = (0..w).rev().find(|&i| idx[i] < n - w + i) else {
            return Ok(false);
        };
        idx[i] += 1;
        for t in i + 1..w {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

fn differing_positions(a: &[Symbol], b: &[Symbol]) -> Vec<usize> {
    (0..a.len()).filter(|&i| a[i] != b[i]).collect()
}

/// Moves the sent codeword toward its nearest rival (greedy) or searches all
/// modifications of at most `budget` symbols for one that the
/// minimum-distance decoder gets wrong (exhaustive; unmodified if none).
pub fn foreseer_replacement_attack(code: &LinearCode, sent: u64, budget: usize, policy: Policy) -> Result<Vec<Symbol>> {
    let c = code.codeword(sent)?;
    if budget == 0 {
        return Ok(c);
    }
    match policy {
        Policy::Greedy => {
            let (rival, _) = code.nearest_rival(sent)?;
            let r = code.codeword(rival)?;
            let mut out = c.clone();
            for i in differing_positions(&c, &r).into_iter().take(budget) {
                out[i] = r[i];
            }
            Ok(out)
        }
        Policy::Exhaustive => {
            let (n, q) = (code.n(), code.q());
            let budget = budget.min(n);
            let size: u128 = (1..=budget)
                .map(|w| binom(n, w) * ((q - 1) as u128).pow(w as u32))
                .sum();
            if size > MAX_EXHAUSTIVE {
                return Err(Error::SearchTooLarge {
                    size,
                    limit: MAX_EXHAUSTIVE,
                });
            }
            let mut found = None;
            for w in 1..=budget {
                let hit = for_each_subset(n, w, &mut |pos| {
                    // offsets 1..q-1 at each chosen position, odometer order
                    let mut off = vec![1u32; w];
                    loop {
                        let mut y = c.clone();
                        for (t, &i) in pos.iter().enumerate() {
                            y[i] = (c[i] + off[t]) % q;
                        }
                        if min_distance_decode(&y, code)? != sent {
                            found = Some(y);
                            return Ok(true);
                        }
                        let mut t = w;
                        loop {
                            if t == 0 {
                                return Ok(false);
                            }
                            t -= 1;
                            if off[t] + 1 < q {
                                off[t] += 1;
                                off[t + 1..].iter_mut().for_each(|o| *o = 1);
                                break;
                            }
                        }
                    }
                })?;
                if hit {
                    break;
                }
            }
            Ok(found.unwrap_or(c))
        }
    }
}

/// Erases positions where the sent codeword differs from its nearest rival
/// (greedy) or searches all erasure sets of at most `budget` positions for
/// one that leaves the decoder without a unique answer (exhaustive).
pub fn foreseer_erasure_attack(code: &LinearCode, sent: u64, budget: usize, policy: Policy) -> Result<Vec<Symbol>> {
    let c = code.codeword(sent)?;
    let erased = code.q();
    if budget == 0 {
        return Ok(c);
    }
    match policy {
        Policy::Greedy => {
            let (rival, _) = code.nearest_rival(sent)?;
            let r = code.codeword(rival)?;
            let mut out = c.clone();
            for i in differing_positions(&c, &r).into_iter().take(budget) {
                out[i] = erased;
            }
            Ok(out)
        }
        Policy::Exhaustive => {
            let n = code.n();
            let budget = budget.min(n);
            let size: u128 = (1..=budget).map(|w| binom(n, w)).sum();
            if size > MAX_EXHAUSTIVE {
                return Err(Error::SearchTooLarge {
                    size,
                    limit: MAX_EXHAUSTIVE,
                });
            }
            let mut found = None;
            for w in 1..=budget {
                let hit = for_each_subset(n, w, &mut |pos| {
                    let mut y = c.clone();
                    for &i in pos {
                        y[i] = erased;
                    }
                    let unique = matches!(
                        erasure_decode(&y, code)?,
                        ErasureDecoding::Unique { message } if message == sent
                    );
                    if !unique {
                        found = Some(y);
                    }
                    Ok(!unique)
                })?;
                if hit {
                    break;
                }
            }
            Ok(found.unwrap_or(c))
        }
    }
}
