//! End-to-end Monte Carlo: encode per route, attack, add noise, decode.
//!
//! Each trial draws from its own ChaCha8 stream keyed by
//! `(seed, placement index, trial index)`, and outcomes are folded in trial
//! order, so results do not depend on the rayon schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary_lab::{AdversaryStrategy, StrategySpec};
use crate::channel_model::{
    apply_awgn, apply_noise, block_distortion, squared_error_distortion, DistortionMeasure,
    NetworkSpec, PlacementVector, Symbol,
};
use crate::code_lab::{erasure_decode, min_distance_decode, ErasureDecoding, LinearCode};
use crate::error::{Error, Result};
use crate::info_math::{mutual_information, JointPmf};

pub const MIN_TRIALS: usize = 100;
pub const MIN_MI_SAMPLES: usize = 10_000;
const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementSelection {
    All,
    One(PlacementVector),
}

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub network: NetworkSpec,
    /// One code per route; `None` exactly on Gaussian routes.
    pub codes: Vec<Option<LinearCode>>,
    pub strategies: Vec<StrategySpec>,
    pub placements: PlacementSelection,
    pub block_length: usize,
    pub trials: usize,
    pub seed: u64,
    /// Keep the symbol blocks of every trial (debugging only).
    pub keep_traces: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Decoder {
    MinDistance,
    Erasure,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        let n_r = self.network.n_r();
        if self.codes.len() != n_r || self.strategies.len() != n_r {
            return Err(Error::Config(format!(
                "{n_r} routes but {} codes and {} strategies",
                self.codes.len(),
                self.strategies.len()
            )));
        }
        if self.trials < MIN_TRIALS {
            return Err(Error::Config(format!("trials = {} below {MIN_TRIALS}", self.trials)));
        }
        if self.trials >= 1 << 32 {
            return Err(Error::Config("trials must stay below 2^32".into()));
        }
        if self.block_length == 0 {
            return Err(Error::Config("block length must be positive".into()));
        }
        if let PlacementSelection::One(p) = &self.placements {
            if p.len() != n_r || p.weight() > self.network.n_a() {
                return Err(Error::Config(format!(
                    "placement {p} invalid for n_r = {n_r}, n_a = {}",
                    self.network.n_a()
                )));
            }
        }
        for (j, (route, code)) in self.network.routes().iter().zip(&self.codes).enumerate() {
            match (route.is_discrete(), code) {
                (false, None) => {}
                (false, Some(_)) => {
                    return Err(Error::Config(format!("route {j} is Gaussian and takes no code")))
                }
                (true, None) => return Err(Error::Config(format!("route {j} needs a code"))),
                (true, Some(c)) => {
                    if c.n() != self.block_length {
                        return Err(Error::LengthMismatch {
                            expected: self.block_length,
                            actual: c.n(),
                        });
                    }
                    if Some(c.q() as usize) != route.input_alphabet() {
                        return Err(Error::AlphabetMismatch(format!(
                            "route {j} carries {:?} symbols, code is over F_{}",
                            route.input_alphabet(),
                            c.q()
                        )));
                    }
                    decoder_for(j, route.measure(), route.output_alphabet(), c.q())?;
                }
            }
        }
        Ok(())
    }

    pub fn placement_list(&self) -> Result<Vec<PlacementVector>> {
        match &self.placements {
            PlacementSelection::All => self.network.placements(),
            PlacementSelection::One(p) => Ok(vec![p.clone()]),
        }
    }
}

fn decoder_for(j: usize, measure: DistortionMeasure, outputs: Option<usize>, q: u32) -> Result<Decoder> {
    match (measure, outputs) {
        (DistortionMeasure::Hamming { .. }, Some(o)) if o == q as usize => Ok(Decoder::MinDistance),
        (DistortionMeasure::Erasure { .. }, Some(o)) if o == q as usize + 1 => Ok(Decoder::Erasure),
        _ => Err(Error::NotApplicable {
            evaluator: "sim_engine",
            reason: format!("no decoder for the output alphabet of route {j}"),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RouteTrace {
    Discrete {
        x: Vec<Symbol>,
        x_a: Vec<Symbol>,
        y: Vec<Symbol>,
    },
    Real {
        x: Vec<f64>,
        x_a: Vec<f64>,
        y: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteOutcome {
    pub sent: Option<u64>,
    /// `None` when the decoder gave no unique answer.
    pub decoded: Option<u64>,
    pub distortion: f64,
    #[serde(skip)]
    moments: MiAccumulator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<RouteTrace>,
}

impl RouteOutcome {
    pub fn error(&self) -> bool {
        self.sent.is_some() && self.decoded != self.sent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub routes: Vec<RouteOutcome>,
}

impl TrialOutcome {
    /// Any discrete route decoded wrongly.
    pub fn block_error(&self) -> bool {
        self.routes.iter().any(RouteOutcome::error)
    }
}

/// Sufficient statistics for the per-route MI estimate: symbol pair counts
/// on discrete routes, first and second moments on Gaussian ones.
#[derive(Debug, Clone, PartialEq, Default)]
enum MiAccumulator {
    #[default]
    Empty,
    Counts(Vec<Vec<u64>>),
    Moments([f64; 6]),
}

impl MiAccumulator {
    fn merge(&mut self, other: &MiAccumulator) {
        match (self, other) {
            (_, MiAccumulator::Empty) => {}
            (s @ MiAccumulator::Empty, o) => *s = o.clone(),
            (MiAccumulator::Counts(a), MiAccumulator::Counts(b)) => {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
            }
            (MiAccumulator::Moments(a), MiAccumulator::Moments(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            _ => unreachable!("route kinds are fixed per route"),
        }
    }

    fn estimate(&self) -> Option<f64> {
        match self {
            MiAccumulator::Empty => None,
            MiAccumulator::Counts(c) => mi_from_counts(c).ok(),
            MiAccumulator::Moments([n, sx, sy, sxx, syy, sxy]) => {
                // jointly Gaussian: I = -1/2 log2(1 - rho^2)
                let cov = sxy / n - sx * sy / (n * n);
                let vx = sxx / n - sx * sx / (n * n);
                let vy = syy / n - sy * sy / (n * n);
                if vx <= 0.0 || vy <= 0.0 {
                    return Some(0.0);
                }
                let rho2 = (cov * cov / (vx * vy)).min(1.0 - 1e-15);
                Some(-0.5 * (1.0 - rho2).log2())
            }
        }
    }
}

fn count_pairs(x: &[Symbol], y: &[Symbol], nx: usize, ny: usize) -> Vec<Vec<u64>> {
    let mut c = vec![vec![0u64; ny]; nx];
    for (a, b) in x.iter().zip(y) {
        c[*a as usize][*b as usize] += 1;
    }
    c
}

fn mi_from_counts(counts: &[Vec<u64>]) -> Result<f64> {
    let total: u64 = counts.iter().flatten().sum();
    if total == 0 {
        return Err(Error::InvalidDistribution("no samples".into()));
    }
    let table = counts
        .iter()
        .map(|r| r.iter().map(|&c| c as f64 / total as f64).collect())
        .collect();
    Ok(mutual_information(&JointPmf::new(table)?))
}

/// Plug-in mutual information (bits) of paired discrete samples. The
/// estimate is biased upward by roughly `(|X|-1)(|Y|-1) / (2 ln 2 m)` for
/// `m` samples.
pub fn empirical_mi(x: &[Symbol], y: &[Symbol]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < MIN_MI_SAMPLES {
        return Err(Error::OutOfRange {
            name: "sample count",
            value: x.len() as f64,
            range: ">= 10000",
        });
    }
    let nx = *x.iter().max().unwrap() as usize + 1;
    let ny = *y.iter().max().unwrap() as usize + 1;
    mi_from_counts(&count_pairs(x, y, nx, ny))
}

/// Upper bound on the plug-in bias for alphabet sizes `nx`, `ny`.
pub fn mi_bias_bound(nx: usize, ny: usize, samples: usize) -> f64 {
    ((nx * ny) as f64 - 1.0) / (2.0 * std::f64::consts::LN_2 * samples as f64)
}

/// Wilson score interval at 95% for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (nf, p) = (n as f64, k as f64 / n as f64);
    let z2 = WILSON_Z * WILSON_Z;
    let centre = (p + z2 / (2.0 * nf)) / (1.0 + z2 / nf);
    let half = WILSON_Z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / (1.0 + z2 / nf);
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// The RNG for one trial.
pub fn trial_rng(seed: u64, placement_index: usize, trial_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((placement_index as u64) << 32) | trial_index as u64);
    rng
}

fn resolve(config: &TrialConfig, placement: &PlacementVector) -> Result<Vec<AdversaryStrategy>> {
    config
        .network
        .routes()
        .iter()
        .zip(&config.strategies)
        .enumerate()
        .map(|(j, (r, s))| s.resolve(r, placement.attacked(j)))
        .collect()
}

/// One block on every route under `placement`.
pub fn run_trial<R: Rng + ?Sized>(config: &TrialConfig, placement: &PlacementVector, rng: &mut R) -> Result<TrialOutcome> {
    let strategies = resolve(config, placement)?;
    trial_with(config, &strategies, rng)
}

fn trial_with<R: Rng + ?Sized>(config: &TrialConfig, strategies: &[AdversaryStrategy], rng: &mut R) -> Result<TrialOutcome> {
    let n = config.block_length;
    let mut routes = Vec::with_capacity(strategies.len());
    for ((route, code), strat) in config.network.routes().iter().zip(&config.codes).zip(strategies) {
        let outcome = match code {
            Some(code) => {
                let sent = rng.random_range(0..code.message_count());
                let x = code.codeword(sent)?;
                let x_a = strat.attack(&x, Some((code, sent)), rng)?;
                let y = apply_noise(route, &x_a, rng)?;
                let decoded = match decoder_for(0, route.measure(), route.output_alphabet(), code.q())? {
                    Decoder::MinDistance => Some(min_distance_decode(&y, code)?),
                    Decoder::Erasure => match erasure_decode(&y, code)? {
                        ErasureDecoding::Unique { message } => Some(message),
                        _ => None,
                    },
                };
                let nx = code.q() as usize;
                let ny = route.output_alphabet().unwrap_or(nx);
                RouteOutcome {
                    sent: Some(sent),
                    decoded,
                    distortion: block_distortion(&x, &x_a, &route.measure())?,
                    moments: MiAccumulator::Counts(count_pairs(&x, &y, nx, ny)),
                    trace: config
                        .keep_traces
                        .then(|| RouteTrace::Discrete { x: x.clone(), x_a, y }),
                }
            }
            None => {
                let power = route.power.unwrap_or(0.0);
                let normal = Normal::new(0.0, power.sqrt()).map_err(|e| Error::InvalidNetwork(e.to_string()))?;
                let x: Vec<f64> = (0..n).map(|_| normal.sample(rng)).collect();
                let x_a = strat.attack_real(&x, rng)?;
                let y = apply_awgn(route, &x_a, rng)?;
                let mut m = [n as f64, 0.0, 0.0, 0.0, 0.0, 0.0];
                for (a, b) in x.iter().zip(&y) {
                    m[1] += a;
                    m[2] += b;
                    m[3] += a * a;
                    m[4] += b * b;
                    m[5] += a * b;
                }
                RouteOutcome {
                    sent: None,
                    decoded: None,
                    distortion: squared_error_distortion(&x, &x_a)?,
                    moments: MiAccumulator::Moments(m),
                    trace: config.keep_traces.then(|| RouteTrace::Real { x: x.clone(), x_a, y }),
                }
            }
        };
        routes.push(outcome);
    }
    Ok(TrialOutcome { routes })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteStats {
    pub route: usize,
    pub attacked: bool,
    pub budget: f64,
    /// Decoding errors (discrete routes only).
    pub errors: Option<u64>,
    pub error_rate: Option<f64>,
    pub mean_distortion: f64,
    pub max_distortion: f64,
    pub budget_violations: u64,
    pub mutual_information: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementStats {
    pub placement: PlacementVector,
    pub trials: u64,
    pub block_errors: u64,
    pub error_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub routes: Vec<RouteStats>,
}

impl PlacementStats {
    pub fn budget_violations(&self) -> u64 {
        self.routes.iter().map(|r| r.budget_violations).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub seed: u64,
    pub block_length: usize,
    pub trials: usize,
    pub placements: Vec<PlacementStats>,
    /// Index of the placement with the highest block error rate (first on
    /// ties).
    pub worst_placement: usize,
    pub worst_error_rate: f64,
    pub audit_passed: bool,
    #[serde(skip)]
    pub traces: Vec<Vec<TrialOutcome>>,
}

impl TrialStats {
    pub fn worst(&self) -> &PlacementStats {
        &self.placements[self.worst_placement]
    }
}

struct RouteAcc {
    errors: u64,
    distortion_sum: f64,
    max_distortion: f64,
    violations: u64,
    mi: MiAccumulator,
}

/// Runs `config.trials` blocks for every requested placement.
pub fn monte_carlo(config: &TrialConfig) -> Result<TrialStats> {
    monte_carlo_with_progress(config, |_, _| {})
}

/// As [`monte_carlo`], calling `progress(done, total)` after each
/// placement.
pub fn monte_carlo_with_progress<F: FnMut(usize, usize)>(config: &TrialConfig, mut progress: F) -> Result<TrialStats> {
    config.validate()?;
    let placements = config.placement_list()?;
    let mut stats = Vec::with_capacity(placements.len());
    let mut traces = Vec::new();
    for (pi, placement) in placements.iter().enumerate() {
        let strategies = resolve(config, placement)?;
        let outcomes = (0..config.trials)
            .into_par_iter()
            .map(|t| trial_with(config, &strategies, &mut trial_rng(config.seed, pi, t)))
            .collect::<Result<Vec<_>>>()?;
        let mut acc: Vec<RouteAcc> = strategies
            .iter()
            .map(|_| RouteAcc {
                errors: 0,
                distortion_sum: 0.0,
                max_distortion: 0.0,
                violations: 0,
                mi: MiAccumulator::Empty,
            })
            .collect();
        let mut block_errors = 0;
        for o in &outcomes {
            block_errors += o.block_error() as u64;
            for ((a, r), s) in acc.iter_mut().zip(&o.routes).zip(&strategies) {
                a.errors += r.error() as u64;
                a.distortion_sum += r.distortion;
                a.max_distortion = a.max_distortion.max(r.distortion);
                a.violations += (r.distortion > s.budget + 1e-12) as u64;
                a.mi.merge(&r.moments);
            }
        }
        let trials = config.trials as u64;
        let (lo, hi) = wilson_interval(block_errors, trials);
        let routes = acc
            .into_iter()
            .enumerate()
            .map(|(j, a)| {
                let discrete = config.codes[j].is_some();
                RouteStats {
                    route: j,
                    attacked: placement.attacked(j),
                    budget: strategies[j].budget,
                    errors: discrete.then_some(a.errors),
                    error_rate: discrete.then(|| a.errors as f64 / trials as f64),
                    mean_distortion: a.distortion_sum / trials as f64,
                    max_distortion: a.max_distortion,
                    budget_violations: a.violations,
                    mutual_information: a.mi.estimate(),
                }
            })
            .collect();
        stats.push(PlacementStats {
            placement: placement.clone(),
            trials,
            block_errors,
            error_rate: block_errors as f64 / trials as f64,
            wilson_low: lo,
            wilson_high: hi,
            routes,
        });
        if config.keep_traces {
            traces.push(outcomes);
        }
        progress(pi + 1, placements.len());
    }
    let worst = stats.iter().enumerate().fold(0, |w, (i, s)| {
        if s.error_rate > stats[w].error_rate {
            i
        } else {
            w
        }
    });
    Ok(TrialStats {
        seed: config.seed,
        block_length: config.block_length,
        trials: config.trials,
        worst_error_rate: stats[worst].error_rate,
        worst_placement: worst,
        audit_passed: stats.iter().all(|s| s.budget_violations() == 0),
        placements: stats,
        traces,
    })
}

/// One row per placement and route.
pub fn write_stats_csv<W: std::io::Write>(stats: &TrialStats, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record([
        "placement",
        "route",
        "attacked",
        "trials",
        "block_errors",
        "block_error_rate",
        "wilson_low",
        "wilson_high",
        "route_error_rate",
        "mean_distortion",
        "max_distortion",
        "budget",
        "budget_violations",
        "mutual_information",
    ])
    .map_err(io)?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_default();
    for p in &stats.placements {
        for r in &p.routes {
            w.write_record([
                p.placement.to_string(),
                r.route.to_string(),
                r.attacked.to_string(),
                p.trials.to_string(),
                p.block_errors.to_string(),
                format!("{:.12}", p.error_rate),
                format!("{:.12}", p.wilson_low),
                format!("{:.12}", p.wilson_high),
                opt(r.error_rate),
                format!("{:.12}", r.mean_distortion),
                format!("{:.12}", r.max_distortion),
                format!("{:.12}", r.budget),
                r.budget_violations.to_string(),
                opt(r.mutual_information),
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary_lab::{worst_memoryless_replacement, Policy};
    use crate::channel_model::RouteSpec;
    use crate::code_lab::random_generator;

    fn hamming74() -> LinearCode {
        LinearCode::new(
            2,
            vec![
                vec![1, 0, 0, 0, 1, 1, 0],
                vec![0, 1, 0, 0, 1, 0, 1],
                vec![0, 0, 1, 0, 0, 1, 1],
                vec![0, 0, 0, 1, 1, 1, 1],
            ],
        )
        .unwrap()
    }

    fn config(network: NetworkSpec, code: LinearCode, strategy: StrategySpec, trials: usize) -> TrialConfig {
        let n_r = network.n_r();
        TrialConfig {
            codes: vec![Some(code.clone()); n_r],
            strategies: vec![strategy; n_r],
            block_length: code.n(),
            network,
            placements: PlacementSelection::All,
            trials,
            seed: 11,
            keep_traces: false,
        }
    }

    #[test]
    fn noiseless_identity_decodes_everything() {
        let net = NetworkSpec::identical(2, 0, RouteSpec::bsc(0.0, 0.0).unwrap()).unwrap();
        let stats = monte_carlo(&config(net, hamming74(), StrategySpec::Identity, 200)).unwrap();
        assert_eq!(stats.placements.len(), 1);
        assert_eq!(stats.worst_error_rate, 0.0);
        assert!(stats.audit_passed);
        let mut rng = trial_rng(1, 0, 0);
        let cfg = config(
            NetworkSpec::identical(1, 1, RouteSpec::bsc(0.0, 0.0).unwrap()).unwrap(),
            hamming74(),
            StrategySpec::Identity,
            100,
        );
        for _ in 0..100 {
            let o = run_trial(&cfg, &"1".parse().unwrap(), &mut rng).unwrap();
            assert_eq!(o.routes[0].sent, o.routes[0].decoded);
        }
    }

    /// Exact block error of the [7,4] code on BSC(p) by enumerating every
    /// error pattern against every message.
    fn exact_bsc_error(code: &LinearCode, p: f64) -> f64 {
        let n = code.n();
        let mut total = 0.0;
        for m in 0..code.message_count() {
            let c = code.codeword(m).unwrap();
            for e in 0u32..1 << n {
                let y: Vec<Symbol> = (0..n).map(|i| c[i] ^ (e >> i & 1)).collect();
                let w = e.count_ones() as i32;
                if min_distance_decode(&y, code).unwrap() != m {
                    total += p.powi(w) * (1.0 - p).powi(n as i32 - w);
                }
            }
        }
        total / code.message_count() as f64
    }

    #[test]
    fn bsc_block_error_matches_enumeration() {
        let net = NetworkSpec::identical(1, 0, RouteSpec::bsc(0.1, 0.0).unwrap()).unwrap();
        let stats = monte_carlo(&config(net, hamming74(), StrategySpec::Identity, 100_000)).unwrap();
        let exact = exact_bsc_error(&hamming74(), 0.1);
        // single-error-correcting: 1 - (1-p)^7 - 7p(1-p)^6
        assert!((exact - (1.0 - 0.9f64.powi(7) - 7.0 * 0.1 * 0.9f64.powi(6))).abs() < 1e-12);
        let se = (exact * (1.0 - exact) / 1e5).sqrt();
        assert!((stats.worst_error_rate - exact).abs() < 3.0 * se, "{} vs {exact}", stats.worst_error_rate);
    }

    fn gf2_rank(mut rows: Vec<u64>) -> usize {
        let mut rank = 0;
        for bit in 0..64 {
            if let Some(i) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) {
                rows.swap(rank, i);
                for j in 0..rows.len() {
                    if j != rank && rows[j] >> bit & 1 == 1 {
                        rows[j] ^= rows[rank];
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn bec_failure_matches_rank_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_generator(3, 8, 2, &mut rng).unwrap();
        let code = LinearCode::new(2, g.clone()).unwrap();
        let eps: f64 = 0.3;
        // decoding fails iff the surviving columns have rank < k
        let mut exact = 0.0;
        for e in 0u32..1 << 8 {
            let rows: Vec<u64> = g
                .iter()
                .map(|row| (0..8).filter(|&i| e >> i & 1 == 0).fold(0, |acc, i| acc | (row[i] as u64) << i))
                .collect();
            let w = e.count_ones() as i32;
            if gf2_rank(rows) < code.rank() || code.rank() < 3 {
                exact += eps.powi(w) * (1.0 - eps).powi(8 - w);
            }
        }
        let net = NetworkSpec::identical(1, 0, RouteSpec::bec(eps, 0.0).unwrap()).unwrap();
        let stats = monte_carlo(&config(net, code, StrategySpec::Identity, 50_000)).unwrap();
        let se = (exact * (1.0 - exact) / 5e4).sqrt();
        assert!((stats.worst_error_rate - exact).abs() < 3.0 * se, "{} vs {exact}", stats.worst_error_rate);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let net = NetworkSpec::identical(2, 1, RouteSpec::bsc(0.05, 0.1).unwrap()).unwrap();
        let cfg = config(net, hamming74(), StrategySpec::WorstMemoryless, 2000);
        let a = monte_carlo(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| monte_carlo(&cfg).unwrap());
        assert_eq!(a, b);
        let mut x = Vec::new();
        let mut y = Vec::new();
        write_stats_csv(&a, &mut x).unwrap();
        write_stats_csv(&b, &mut y).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn identical_routes_are_symmetric() {
        let net = NetworkSpec::identical(2, 1, RouteSpec::bsc(0.02, 0.15).unwrap()).unwrap();
        let cfg = config(net, hamming74(), StrategySpec::Foreseer { policy: Policy::Greedy }, 4000);
        let stats = monte_carlo(&cfg).unwrap();
        let p: Vec<String> = stats.placements.iter().map(|p| p.placement.to_string()).collect();
        assert_eq!(p, ["00", "01", "10"]);
        let (a, b) = (&stats.placements[1], &stats.placements[2]);
        assert!(a.wilson_low <= b.wilson_high && b.wilson_low <= a.wilson_high);
        assert!(stats.worst_placement == 1 || stats.worst_placement == 2);
        assert!(stats.audit_passed);
    }

    #[test]
    fn gaussian_route_reports_distortion_and_mi() {
        let net = NetworkSpec::new(1, vec![RouteSpec::awgn(0.5, 0.2, 1.0).unwrap()]).unwrap();
        let cfg = TrialConfig {
            codes: vec![None],
            strategies: vec![StrategySpec::WorstMemoryless],
            block_length: 2000,
            network: net,
            placements: PlacementSelection::One("1".parse().unwrap()),
            trials: 200,
            seed: 3,
            keep_traces: false,
        };
        let stats = monte_carlo(&cfg).unwrap();
        let g = &stats.placements[0].routes[0];
        assert!(g.errors.is_none());
        assert!(g.max_distortion <= 0.2 + 1e-12);
        assert!((g.mean_distortion - 0.2).abs() < 0.01);
        // X -> 0.8 X + N(0, 0.16) -> + N(0, 0.5): rho^2 = 0.64 / 1.3
        let expect = -0.5 * (1.0 - 0.64 / 1.3f64).log2();
        assert!((g.mutual_information.unwrap() - expect).abs() < 0.02, "{g:?} {expect}");
    }

    #[test]
    fn rejects_bad_configs() {
        let net = NetworkSpec::identical(1, 1, RouteSpec::bsc(0.1, 0.1).unwrap()).unwrap();
        let mut cfg = config(net, hamming74(), StrategySpec::Identity, 50);
        assert!(matches!(monte_carlo(&cfg), Err(Error::Config(_))));
        cfg.trials = 100;
        cfg.block_length = 8;
        assert!(matches!(monte_carlo(&cfg), Err(Error::LengthMismatch { .. })));
        cfg.block_length = 7;
        cfg.codes = vec![Some(LinearCode::new(3, vec![vec![1, 2, 0, 1, 1, 1, 1]]).unwrap())];
        assert!(matches!(monte_carlo(&cfg), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn empirical_mi_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x: Vec<Symbol> = (0..100_000).map(|_| rng.random_range(0..2)).collect();
        assert!((empirical_mi(&x, &x).unwrap() - 1.0).abs() < 0.01);
        let y: Vec<Symbol> = (0..100_000).map(|_| rng.random_range(0..2)).collect();
        let mi = empirical_mi(&x, &y).unwrap();
        assert!(mi >= 0.0 && mi <= 5.0 * mi_bias_bound(2, 2, 100_000));
        assert!(empirical_mi(&x[..100], &y[..100]).is_err());

        let law = worst_memoryless_replacement(0.1, 0.1, 0.5).unwrap();
        let strat = AdversaryStrategy::new(
            crate::adversary_lab::StrategyKind::MemorylessLaw { law },
            DistortionMeasure::Hamming { q: 2 },
            0.1,
            true,
        )
        .unwrap();
        let route = RouteSpec::bsc(0.1, 0.1).unwrap();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for b in 0..100 {
            let mut r = trial_rng(9, 0, b);
            let x: Vec<Symbol> = (0..10_000).map(|_| r.random_range(0..2)).collect();
            let xa = strat.attack(&x, None, &mut r).unwrap();
            ys.extend(apply_noise(&route, &xa, &mut r).unwrap());
            xs.extend(x);
        }
        assert!((empirical_mi(&xs, &ys).unwrap() - 0.3199).abs() < 0.01);
    }

    #[test]
    fn wilson_is_well_formed() {
        for (k, n) in [(0, 100), (100, 100), (37, 100), (1, 10_000)] {
            let (lo, hi) = wilson_interval(k, n);
            let p = k as f64 / n as f64;
            assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }
}
