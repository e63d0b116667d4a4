//! Multi-route channel description: per-route noise channels, distortion
//! measures, adversary placements and the stochastic maps between them.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::info_math::CondPmf;

/// Discrete symbol. For erasure alphabets the erasure is the index one past
/// the input alphabet (`q` for inputs `0..q`).
pub type Symbol = u32;

/// Largest route count accepted by placement enumeration.
pub const MAX_ENUM_ROUTES: usize = 20;

/// Slack used when comparing an empirical distortion with its budget.
pub const BUDGET_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistortionMeasure {
    /// Substitution over `0..q`; cost 1 per changed symbol.
    Hamming { q: usize },
    /// Input `0..q`, adversary output `0..=q` where `q` is the erasure.
    /// Substitutions cost infinity, erasures cost 1.
    Erasure { q: usize },
    SquaredError,
}

impl DistortionMeasure {
    pub fn input_alphabet(&self) -> Option<usize> {
        match *self {
            DistortionMeasure::Hamming { q } | DistortionMeasure::Erasure { q } => Some(q),
            DistortionMeasure::SquaredError => None,
        }
    }

    pub fn adversary_alphabet(&self) -> Option<usize> {
        match *self {
            DistortionMeasure::Hamming { q } => Some(q),
            DistortionMeasure::Erasure { q } => Some(q + 1),
            DistortionMeasure::SquaredError => None,
        }
    }

    pub fn erasure_symbol(&self) -> Option<Symbol> {
        match *self {
            DistortionMeasure::Erasure { q } => Some(q as Symbol),
            _ => None,
        }
    }

    /// `d(x, x_a)` for discrete measures.
    pub fn symbol_distortion(&self, x: Symbol, x_a: Symbol) -> f64 {
        match *self {
            DistortionMeasure::Hamming { .. } => {
                if x == x_a {
                    0.0
                } else {
                    1.0
                }
            }
            DistortionMeasure::Erasure { q } => {
                if x == x_a {
                    0.0
                } else if x_a as usize == q {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            DistortionMeasure::SquaredError => {
                let d = x as f64 - x_a as f64;
                d * d
            }
        }
    }

    /// Distortion matrix `d(x, x_a)`, rows indexed by input symbol.
    pub fn matrix(&self) -> Option<Vec<Vec<f64>>> {
        let (nx, na) = (self.input_alphabet()?, self.adversary_alphabet()?);
        Some(
            (0..nx)
                .map(|x| {
                    (0..na)
                        .map(|a| self.symbol_distortion(x as Symbol, a as Symbol))
                        .collect()
                })
                .collect(),
        )
    }
}

/// Stochastic channel from the adversary output to the receiver.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    Bsc { crossover: f64 },
    /// Erases non-erased symbols with the given probability; erasures pass.
    Bec { erasure: f64 },
    Awgn { variance: f64 },
    /// Arbitrary discrete law `x_a -> y` with an explicit distortion measure.
    General {
        law: CondPmf,
        measure: DistortionMeasure,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteSpec {
    pub channel: ChannelKind,
    pub distortion_limit: f64,
    /// Input power constraint (Gaussian routes only).
    pub power: Option<f64>,
}

impl RouteSpec {
    pub fn bsc(noise: f64, distortion_limit: f64) -> Result<Self> {
        RouteSpec {
            channel: ChannelKind::Bsc { crossover: noise },
            distortion_limit,
            power: None,
        }
        .validated()
    }

    pub fn bec(noise: f64, distortion_limit: f64) -> Result<Self> {
        RouteSpec {
            channel: ChannelKind::Bec { erasure: noise },
            distortion_limit,
            power: None,
        }
        .validated()
    }

    pub fn awgn(noise: f64, distortion_limit: f64, power: f64) -> Result<Self> {
        RouteSpec {
            channel: ChannelKind::Awgn { variance: noise },
            distortion_limit,
            power: Some(power),
        }
        .validated()
    }

    pub fn general(law: CondPmf, measure: DistortionMeasure, distortion_limit: f64) -> Result<Self> {
        RouteSpec {
            channel: ChannelKind::General { law, measure },
            distortion_limit,
            power: None,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.distortion_limit >= 0.0) || !self.distortion_limit.is_finite() {
            return Err(Error::OutOfRange {
                name: "D",
                value: self.distortion_limit,
                range: "finite D >= 0",
            });
        }
        match &self.channel {
            ChannelKind::Bsc { crossover: n } | ChannelKind::Bec { erasure: n } => {
                check_probability("N", *n)?;
            }
            ChannelKind::Awgn { variance } => {
                if !(*variance > 0.0) || !variance.is_finite() {
                    return Err(Error::OutOfRange {
                        name: "N",
                        value: *variance,
                        range: "N > 0 (noise variance)",
                    });
                }
                match self.power {
                    Some(p) if p > 0.0 && p.is_finite() => {}
                    other => {
                        return Err(Error::OutOfRange {
                            name: "P",
                            value: other.unwrap_or(f64::NAN),
                            range: "P > 0 (Gaussian routes need a power constraint)",
                        })
                    }
                }
            }
            ChannelKind::General { law, measure } => {
                let expected = measure.adversary_alphabet().ok_or_else(|| {
                    Error::InvalidNetwork("general routes need a discrete measure".into())
                })?;
                if law.inputs() != expected {
                    return Err(Error::AlphabetMismatch(format!(
                        "law has {} inputs, measure expects {expected}",
                        law.inputs()
                    )));
                }
            }
        }
        if self.power.is_some() && !matches!(self.channel, ChannelKind::Awgn { .. }) {
            return Err(Error::InvalidNetwork(
                "power constraint only applies to Gaussian routes".into(),
            ));
        }
        Ok(self)
    }

    pub fn measure(&self) -> DistortionMeasure {
        match &self.channel {
            ChannelKind::Bsc { .. } => DistortionMeasure::Hamming { q: 2 },
            ChannelKind::Bec { .. } => DistortionMeasure::Erasure { q: 2 },
            ChannelKind::Awgn { .. } => DistortionMeasure::SquaredError,
            ChannelKind::General { measure, .. } => *measure,
        }
    }

    /// Channel parameter `N_j` for the built-in kinds.
    pub fn noise(&self) -> Option<f64> {
        match self.channel {
            ChannelKind::Bsc { crossover } => Some(crossover),
            ChannelKind::Bec { erasure } => Some(erasure),
            ChannelKind::Awgn { variance } => Some(variance),
            ChannelKind::General { .. } => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self.channel, ChannelKind::Awgn { .. })
    }

    /// Transition matrix `x_a -> y` for discrete routes.
    pub fn law(&self) -> Option<CondPmf> {
        match &self.channel {
            ChannelKind::Bsc { crossover } => CondPmf::bsc(*crossover).ok(),
            ChannelKind::Bec { erasure } => {
                let e = *erasure;
                CondPmf::new(vec![
                    vec![1.0 - e, 0.0, e],
                    vec![0.0, 1.0 - e, e],
                    vec![0.0, 0.0, 1.0],
                ])
                .ok()
            }
            ChannelKind::Awgn { .. } => None,
            ChannelKind::General { law, .. } => Some(law.clone()),
        }
    }

    pub fn input_alphabet(&self) -> Option<usize> {
        self.measure().input_alphabet()
    }

    pub fn output_alphabet(&self) -> Option<usize> {
        self.law().map(|l| l.outputs())
    }

    pub fn kind_name(&self) -> &'static str {
        match self.channel {
            ChannelKind::Bsc { .. } => "bsc",
            ChannelKind::Bec { .. } => "bec",
            ChannelKind::Awgn { .. } => "awgn",
            ChannelKind::General { .. } => "general",
        }
    }
}

/// Indicator of attacked routes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlacementVector(Vec<bool>);

impl PlacementVector {
    pub fn new(bits: Vec<bool>) -> Self {
        PlacementVector(bits)
    }

    pub fn none(n_r: usize) -> Self {
        PlacementVector(vec![false; n_r])
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn attacked(&self, route: usize) -> bool {
        self.0[route]
    }

    /// `s(j)` as 0.0 / 1.0.
    pub fn factor(&self, route: usize) -> f64 {
        if self.0[route] {
            1.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for PlacementVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PlacementVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !matches!(c, ',' | ' ' | '[' | ']'))
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Config(format!("bad placement character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PlacementVector)
    }
}

impl Serialize for PlacementVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PlacementVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Routes, adversary count and per-route parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkRepr", into = "NetworkRepr")]
pub struct NetworkSpec {
    n_r: usize,
    n_a: usize,
    routes: Vec<RouteSpec>,
}

impl NetworkSpec {
    pub fn new(n_a: usize, routes: Vec<RouteSpec>) -> Result<Self> {
        let n_r = routes.len();
        if n_r == 0 {
            return Err(Error::InvalidNetwork("at least one route required".into()));
        }
        if n_a > n_r {
            return Err(Error::InvalidNetwork(format!(
                "n_a = {n_a} exceeds n_r = {n_r}"
            )));
        }
        let routes = routes
            .into_iter()
            .map(RouteSpec::validated)
            .collect::<Result<Vec<_>>>()?;
        Ok(NetworkSpec { n_r, n_a, routes })
    }

    /// `n_r` copies of the same route.
    pub fn identical(n_r: usize, n_a: usize, route: RouteSpec) -> Result<Self> {
        NetworkSpec::new(n_a, vec![route; n_r])
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn routes(&self) -> &[RouteSpec] {
        &self.routes
    }

    pub fn placements(&self) -> Result<Vec<PlacementVector>> {
        enumerate_placements(self.n_r, self.n_a)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RouteKindRepr {
    Bsc,
    Bec,
    Awgn,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MeasureRepr {
    Hamming,
    Erasure,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RouteRepr {
    kind: RouteKindRepr,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    noise: Option<f64>,
    #[serde(rename = "D")]
    distortion: f64,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measure: Option<MeasureRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    law: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct NetworkRepr {
    n_r: usize,
    n_a: usize,
    routes: Vec<RouteRepr>,
}

impl TryFrom<RouteRepr> for RouteSpec {
    type Error = Error;
    fn try_from(r: RouteRepr) -> Result<Self> {
        let need_noise = || {
            r.noise
                .ok_or_else(|| Error::Config(format!("route kind {:?} needs `N`", r.kind)))
        };
        match r.kind {
            RouteKindRepr::Bsc => RouteSpec::bsc(need_noise()?, r.distortion),
            RouteKindRepr::Bec => RouteSpec::bec(need_noise()?, r.distortion),
            RouteKindRepr::Awgn => RouteSpec::awgn(
                need_noise()?,
                r.distortion,
                r.power
                    .ok_or_else(|| Error::Config("awgn route needs `P`".into()))?,
            ),
            RouteKindRepr::General => {
                let law = CondPmf::new(
                    r.law
                        .clone()
                        .ok_or_else(|| Error::Config("general route needs `law`".into()))?,
                )?;
                let measure = match r.measure.unwrap_or(MeasureRepr::Hamming) {
                    MeasureRepr::Hamming => DistortionMeasure::Hamming { q: law.inputs() },
                    MeasureRepr::Erasure => DistortionMeasure::Erasure {
                        q: law.inputs().saturating_sub(1),
                    },
                };
                RouteSpec::general(law, measure, r.distortion)
            }
        }
    }
}

impl From<&RouteSpec> for RouteRepr {
    fn from(r: &RouteSpec) -> Self {
        let (kind, measure, law) = match &r.channel {
            ChannelKind::Bsc { .. } => (RouteKindRepr::Bsc, None, None),
            ChannelKind::Bec { .. } => (RouteKindRepr::Bec, None, None),
            ChannelKind::Awgn { .. } => (RouteKindRepr::Awgn, None, None),
            ChannelKind::General { law, measure } => (
                RouteKindRepr::General,
                Some(match measure {
                    DistortionMeasure::Erasure { .. } => MeasureRepr::Erasure,
                    _ => MeasureRepr::Hamming,
                }),
                Some(law.clone().into()),
            ),
        };
        RouteRepr {
            kind,
            noise: r.noise(),
            distortion: r.distortion_limit,
            power: r.power,
            measure,
            law,
        }
    }
}

impl TryFrom<NetworkRepr> for NetworkSpec {
    type Error = Error;
    fn try_from(repr: NetworkRepr) -> Result<Self> {
        if repr.routes.len() != repr.n_r {
            return Err(Error::Config(format!(
                "n_r = {} but {} routes listed",
                repr.n_r,
                repr.routes.len()
            )));
        }
        let routes = repr
            .routes
            .into_iter()
            .map(RouteSpec::try_from)
            .collect::<Result<Vec<_>>>()?;
        NetworkSpec::new(repr.n_a, routes)
    }
}

impl From<NetworkSpec> for NetworkRepr {
    fn from(n: NetworkSpec) -> Self {
        NetworkRepr {
            n_r: n.n_r,
            n_a: n.n_a,
            routes: n.routes.iter().map(RouteRepr::from).collect(),
        }
    }
}

/// All placements of weight `<= n_a` in lexicographic order.
pub fn enumerate_placements(n_r: usize, n_a: usize) -> Result<Vec<PlacementVector>> {
    if n_r > MAX_ENUM_ROUTES {
        return Err(Error::InvalidNetwork(format!(
            "n_r = {n_r} exceeds enumeration limit {MAX_ENUM_ROUTES}"
        )));
    }
    if n_a > n_r {
        return Err(Error::InvalidNetwork(format!(
            "n_a = {n_a} exceeds n_r = {n_r}"
        )));
    }
    Ok((0u32..(1u32 << n_r))
        .filter(|m| m.count_ones() as usize <= n_a)
        .map(|m| PlacementVector((0..n_r).map(|j| m >> (n_r - 1 - j) & 1 == 1).collect()))
        .collect())
}

/// Passes a block of adversary outputs through a discrete route.
pub fn apply_noise<R: Rng + ?Sized>(
    route: &RouteSpec,
    x_a: &[Symbol],
    rng: &mut R,
) -> Result<Vec<Symbol>> {
    match &route.channel {
        ChannelKind::Bsc { crossover } => x_a
            .iter()
            .map(|&s| match s {
                0 | 1 => Ok(if rng.random::<f64>() < *crossover { s ^ 1 } else { s }),
                other => Err(Error::AlphabetMismatch(format!("symbol {other} on a BSC"))),
            })
            .collect(),
        ChannelKind::Bec { erasure } => x_a
            .iter()
            .map(|&s| match s {
                0 | 1 => Ok(if rng.random::<f64>() < *erasure { 2 } else { s }),
                2 => Ok(2),
                other => Err(Error::AlphabetMismatch(format!("symbol {other} on a BEC"))),
            })
            .collect(),
        ChannelKind::General { law, .. } => x_a
            .iter()
            .map(|&s| {
                let row = law
                    .rows()
                    .get(s as usize)
                    .ok_or_else(|| Error::AlphabetMismatch(format!("symbol {s} outside law")))?;
                Ok(sample_index(row.probs(), rng) as Symbol)
            })
            .collect(),
        ChannelKind::Awgn { .. } => Err(Error::AlphabetMismatch(
            "Gaussian route carries real-valued samples; use apply_awgn".into(),
        )),
    }
}

/// Adds i.i.d. zero-mean Gaussian noise of the route variance.
pub fn apply_awgn<R: Rng + ?Sized>(route: &RouteSpec, x_a: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    match route.channel {
        ChannelKind::Awgn { variance } => {
            let normal = Normal::new(0.0, variance.sqrt())
                .map_err(|e| Error::InvalidNetwork(e.to_string()))?;
            Ok(x_a.iter().map(|v| v + normal.sample(rng)).collect())
        }
        _ => Err(Error::AlphabetMismatch(
            "apply_awgn needs a Gaussian route".into(),
        )),
    }
}

pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // round-off: fall back to the last symbol with positive mass
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

/// Mean per-symbol distortion between a block and its modified version.
pub fn block_distortion(x: &[Symbol], x_a: &[Symbol], measure: &DistortionMeasure) -> Result<f64> {
    if x.len() != x_a.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: x_a.len(),
        });
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = x
        .iter()
        .zip(x_a)
        .map(|(&a, &b)| measure.symbol_distortion(a, b))
        .sum();
    Ok(total / x.len() as f64)
}

pub fn squared_error_distortion(x: &[f64], x_a: &[f64]) -> Result<f64> {
    if x.len() != x_a.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: x_a.len(),
        });
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    Ok(x.iter().zip(x_a).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / x.len() as f64)
}

/// True iff the block distortion is within `budget` (inclusive, with slack).
/// Mismatched lengths never pass.
pub fn check_budget(x: &[Symbol], x_a: &[Symbol], measure: &DistortionMeasure, budget: f64) -> bool {
    block_distortion(x, x_a, measure)
        .map(|d| d <= budget + BUDGET_SLACK)
        .unwrap_or(false)
}

pub fn check_budget_real(x: &[f64], x_a: &[f64], budget: f64) -> bool {
    squared_error_distortion(x, x_a)
        .map(|d| d <= budget + BUDGET_SLACK)
        .unwrap_or(false)
}

/// Number of symbols a hard per-block budget allows: `floor(n D)`.
pub fn hard_budget(n: usize, distortion_limit: f64) -> usize {
    ((n as f64) * distortion_limit + 1e-9).floor().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn placement_examples() {
        let p = enumerate_placements(1, 0).unwrap();
        assert_eq!(p, vec![PlacementVector::new(vec![false])]);
        let p: Vec<String> = enumerate_placements(2, 1)
            .unwrap()
            .iter()
            .map(|v| v.to_string())
            .collect();
        assert_eq!(p, ["00", "01", "10"]);
        assert_eq!(enumerate_placements(4, 2).unwrap().len(), 11);
        assert!(enumerate_placements(21, 1).is_err());
        assert!(enumerate_placements(3, 4).is_err());
    }

    #[test]
    fn placement_counts_match_binomial_sums() {
        for n_r in 0..=10 {
            for n_a in 0..=n_r {
                let expected: usize = (0..=n_a).map(|w| binom(n_r, w)).sum();
                let got = enumerate_placements(n_r, n_a).unwrap();
                assert_eq!(got.len(), expected);
                assert!(got.windows(2).all(|w| w[0] < w[1]));
                assert!(got.iter().all(|p| p.weight() <= n_a));
            }
        }
    }

    #[test]
    fn noiseless_bsc_is_identity() {
        let route = RouteSpec::bsc(0.0, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<Symbol> = (0..500).map(|i| (i % 3 == 0) as Symbol).collect();
        assert_eq!(apply_noise(&route, &x, &mut rng).unwrap(), x);
    }

    #[test]
    fn bec_passes_erasures() {
        let route = RouteSpec::bec(0.7, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = vec![2, 0, 2, 1, 2];
        let y = apply_noise(&route, &x, &mut rng).unwrap();
        for i in [0, 2, 4] {
            assert_eq!(y[i], 2);
        }
        assert!(apply_noise(&route, &[3], &mut rng).is_err());
    }

    #[test]
    fn bsc_flip_rate_concentrates() {
        let route = RouteSpec::bsc(0.1, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<Symbol> = (0..100_000).map(|_| rng.random_range(0..2)).collect();
        let y = apply_noise(&route, &x, &mut rng).unwrap();
        let flips = x.iter().zip(&y).filter(|(a, b)| a != b).count();
        let rate = flips as f64 / x.len() as f64;
        assert!((rate - 0.1).abs() < 0.005, "rate {rate}");
    }

    #[test]
    fn bec_erasure_rate_within_three_standard_errors() {
        let n_trials = 1_000_000;
        let noise = 0.3;
        let route = RouteSpec::bec(noise, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = vec![1; n_trials];
        let y = apply_noise(&route, &x, &mut rng).unwrap();
        let rate = y.iter().filter(|&&s| s == 2).count() as f64 / n_trials as f64;
        let se = (noise * (1.0 - noise) / n_trials as f64).sqrt();
        assert!((rate - noise).abs() < 3.0 * se, "rate {rate}");
    }

    #[test]
    fn apply_noise_reproducible_with_seed() {
        let route = RouteSpec::bsc(0.3, 0.0).unwrap();
        let x = vec![0; 1000];
        let a = apply_noise(&route, &x, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = apply_noise(&route, &x, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gaussian_route_rejects_discrete_stream() {
        let route = RouteSpec::awgn(0.1, 0.1, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(matches!(
            apply_noise(&route, &[0, 1], &mut rng),
            Err(Error::AlphabetMismatch(_))
        ));
        let y = apply_awgn(&route, &vec![0.0; 100_000], &mut rng).unwrap();
        let var = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64;
        assert!((var - 0.1).abs() < 0.003);
    }

    #[test]
    fn distortion_examples() {
        let h = DistortionMeasure::Hamming { q: 2 };
        let x = vec![0, 1, 0, 1, 1, 0, 0, 1, 1, 0];
        assert_eq!(block_distortion(&x, &x, &h).unwrap(), 0.0);
        let mut xa = x.clone();
        for i in [0, 4, 7] {
            xa[i] ^= 1;
        }
        assert!((block_distortion(&x, &xa, &h).unwrap() - 0.3).abs() < 1e-15);

        let e = DistortionMeasure::Erasure { q: 2 };
        let mut sub = x.clone();
        sub[5] = 1;
        assert_eq!(block_distortion(&x, &sub, &e).unwrap(), f64::INFINITY);
        let mut erased = x.clone();
        erased[5] = 2;
        assert!((block_distortion(&x, &erased, &e).unwrap() - 0.1).abs() < 1e-15);
        assert!(block_distortion(&x, &x[..3], &h).is_err());
    }

    #[test]
    fn hamming_matches_naive_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let h = DistortionMeasure::Hamming { q: 5 };
        for _ in 0..200 {
            let n = rng.random_range(1..50);
            let x: Vec<Symbol> = (0..n).map(|_| rng.random_range(0..5)).collect();
            let y: Vec<Symbol> = (0..n).map(|_| rng.random_range(0..5)).collect();
            let mut diff = 0;
            for i in 0..n {
                if x[i] != y[i] {
                    diff += 1;
                }
            }
            let naive = diff as f64 / n as f64;
            assert_eq!(block_distortion(&x, &y, &h).unwrap(), naive);
        }
    }

    #[test]
    fn budget_examples() {
        let h = DistortionMeasure::Hamming { q: 2 };
        let x = vec![0; 100];
        assert!(check_budget(&x, &x, &h, 0.0));
        let mut xa = x.clone();
        xa.iter_mut().take(10).for_each(|s| *s = 1);
        assert!(check_budget(&x, &xa, &h, 0.1));
        xa[10] = 1;
        assert!(!check_budget(&x, &xa, &h, 0.1));
        assert!(!check_budget(&x, &xa[..5], &h, 1.0));
        assert_eq!(hard_budget(100, 0.1), 10);
        assert_eq!(hard_budget(10, 0.3), 3);
        assert_eq!(hard_budget(7, 0.0), 0);
    }

    #[test]
    fn network_validation() {
        let r = RouteSpec::bsc(0.1, 0.1).unwrap();
        assert!(NetworkSpec::new(2, vec![r.clone()]).is_err());
        assert!(NetworkSpec::new(0, vec![]).is_err());
        assert!(RouteSpec::bsc(1.1, 0.1).is_err());
        assert!(RouteSpec::bsc(0.1, -0.1).is_err());
        assert!(RouteSpec::awgn(0.0, 0.1, 1.0).is_err());
        let bad_law = CondPmf::bsc(0.1).unwrap();
        assert!(RouteSpec::general(bad_law, DistortionMeasure::Erasure { q: 2 }, 0.1).is_err());
    }

    #[test]
    fn network_toml_round_trip() {
        let text = r#"
n_r = 3
n_a = 1

[[routes]]
kind = "bsc"
N = 0.1
D = 0.1

[[routes]]
kind = "bec"
N = 0.2
D = 0.05

[[routes]]
kind = "general"
D = 0.1
measure = "hamming"
law = [[0.9, 0.1], [0.2, 0.8]]
"#;
        let spec = NetworkSpec::from_toml_str(text).unwrap();
        assert_eq!(spec.n_r(), 3);
        assert_eq!(spec.routes()[1].noise(), Some(0.2));
        let again = NetworkSpec::from_toml_str(&spec.to_toml_string().unwrap()).unwrap();
        assert_eq!(spec, again);
        assert!(NetworkSpec::from_toml_str("n_r = 2\nn_a = 1\nroutes = []").is_err());
    }
}
