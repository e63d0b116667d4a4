//! Run configurations and the five workflows behind the command-line tool.
//!
//! A run is described by one TOML file:
//!
//! ```toml
//! workflow = "simulate"      # rates | table1 | simulate | sweep | codegen
//! seed = 7                   # required by simulate and codegen
//! out_dir = "out"
//!
//! [network]
//! n_r = 2
//! n_a = 1
//! routes = [{ kind = "bsc", N = 0.05, D = 0.05 }, { kind = "bsc", N = 0.05, D = 0.05 }]
//!
//! [simulate]
//! block_length = 32
//! trials = 1000
//! rate = 0.25
//! strategy = { kind = "worst_memoryless" }
//! ```
//!
//! Every output is a pure function of the config, so reruns are
//! byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary_lab::StrategySpec;
use crate::channel_model::{ChannelKind, NetworkSpec, PlacementVector, RouteSpec};
use crate::code_lab::{gv_distance, gv_rate, varshamov_sample, LinearCode};
use crate::error::{Error, Result};
use crate::rate_engine::{evaluate_all, table1, write_reports_csv, RateReport, SolverOptions};
use crate::sim_engine::{monte_carlo_with_progress, write_stats_csv, PlacementSelection, TrialConfig, TrialStats};

/// Cap on trials per placement written to the trace file.
pub const MAX_TRACE_TRIALS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Workflow {
    Rates,
    Table1,
    Simulate,
    Sweep,
    Codegen,
}

impl std::str::FromStr for Workflow {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rates" => Ok(Workflow::Rates),
            "table1" => Ok(Workflow::Table1),
            "simulate" => Ok(Workflow::Simulate),
            "sweep" => Ok(Workflow::Sweep),
            "codegen" => Ok(Workflow::Codegen),
            other => Err(Error::Config(format!(
                "unknown workflow {other:?}; expected rates, table1, simulate, sweep or codegen"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Config {
    #[serde(rename = "N")]
    pub noise: f64,
    #[serde(rename = "D")]
    pub distortion: f64,
}

fn default_max_tries() -> usize {
    1000
}

fn default_strategy() -> StrategySpec {
    StrategySpec::WorstMemoryless
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub block_length: usize,
    pub trials: usize,
    /// Code dimension; overrides `rate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Target rate; `k = round(rate n)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// Minimum distance to insist on; defaults to the GV distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_target: Option<usize>,
    #[serde(default = "default_max_tries")]
    pub max_tries: usize,
    /// Generator matrix file used on every discrete route instead of sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_file: Option<PathBuf>,
    /// Adversary for every route, unless `strategies` lists one per route.
    #[serde(default = "default_strategy")]
    pub strategy: StrategySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategies: Option<Vec<StrategySpec>>,
    /// Single placement such as `"10"`; all placements when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<PlacementVector>,
    /// Write the symbol blocks of the first trials to `traces.json`.
    #[serde(default)]
    pub traces: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    Noise,
    Distortion,
    Power,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    /// Routes whose parameter moves; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routes: Option<Vec<usize>>,
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        (0..self.steps)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodegenConfig {
    pub q: u32,
    pub k: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_target: Option<usize>,
    #[serde(default = "default_max_tries")]
    pub max_tries: usize,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub workflow: Workflow,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSpec>,
    /// TOML file holding the network instead of an inline table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network_file: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table1: Option<Table1Config>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codegen: Option<CodegenConfig>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config; relative paths inside it resolve against its folder.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = cfg.network_file.as_mut() {
            fix(p);
        }
        if let Some(p) = cfg.simulate.as_mut().and_then(|s| s.code_file.as_mut()) {
            fix(p);
        }
        Ok(cfg)
    }

    /// The network, inline or from `network_file`.
    pub fn network(&self) -> Result<NetworkSpec> {
        match (&self.network, &self.network_file) {
            (Some(n), None) => Ok(n.clone()),
            (None, Some(p)) => {
                let text = fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                NetworkSpec::from_toml_str(&text)
            }
            (Some(_), Some(_)) => Err(Error::Config("give either [network] or network_file, not both".into())),
            (None, None) => Err(Error::Config(format!("workflow {:?} needs a [network] table", self.workflow))),
        }
    }

    fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config(format!("workflow {:?} is stochastic and needs `seed`", self.workflow)))
    }

    /// Checks everything the selected workflow reads before any work starts.
    pub fn validate(&self) -> Result<()> {
        let missing = |t: &str| Error::Config(format!("workflow {:?} needs a [{t}] table", self.workflow));
        match self.workflow {
            Workflow::Rates => {
                self.network()?;
            }
            Workflow::Table1 => {
                let t = self.table1.ok_or_else(|| missing("table1"))?;
                for (name, v) in [("N", t.noise), ("D", t.distortion)] {
                    if !(0.0..=0.5).contains(&v) {
                        return Err(Error::Config(format!("table1.{name} = {v} outside [0, 0.5]")));
                    }
                }
            }
            Workflow::Simulate => {
                self.seed()?;
                let net = self.network()?;
                let s = self.simulate.as_ref().ok_or_else(|| missing("simulate"))?;
                if s.block_length == 0 {
                    return Err(Error::Config("simulate.block_length must be positive".into()));
                }
                if let Some(list) = &s.strategies {
                    if list.len() != net.n_r() {
                        return Err(Error::Config(format!(
                            "simulate.strategies has {} entries for {} routes",
                            list.len(),
                            net.n_r()
                        )));
                    }
                }
                match (&s.code_file, s.k, s.rate) {
                    (Some(p), _, _) if !p.exists() => {
                        return Err(Error::Config(format!("code_file {} does not exist", p.display())))
                    }
                    (Some(_), _, _) => {}
                    (None, None, None) if net.routes().iter().any(RouteSpec::is_discrete) => {
                        return Err(Error::Config("simulate needs `k`, `rate` or `code_file`".into()))
                    }
                    (None, _, Some(r)) if !(r > 0.0 && r <= 1.0) => {
                        return Err(Error::Config(format!("simulate.rate = {r} outside (0, 1]")))
                    }
                    _ => {}
                }
            }
            Workflow::Sweep => {
                let net = self.network()?;
                let s = self.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
                if s.steps < 2 {
                    return Err(Error::Config(format!("sweep.steps = {} must be at least 2", s.steps)));
                }
                if let Some(r) = s.routes.as_ref().and_then(|r| r.iter().find(|&&j| j >= net.n_r())) {
                    return Err(Error::Config(format!("sweep route {r} out of range")));
                }
                for v in s.values() {
                    sweep_network(&net, s, v)?;
                }
            }
            Workflow::Codegen => {
                self.seed()?;
                self.codegen.as_ref().ok_or_else(|| missing("codegen"))?;
            }
        }
        Ok(())
    }
}

/// What a workflow produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    /// False when a simulated block exceeded its budget.
    pub audit_passed: bool,
    /// Short human-readable result.
    pub summary: String,
}

/// Validates `config` and runs its workflow, reporting progress lines to
/// `progress`.
pub fn run(config: &RunConfig, progress: &mut dyn FnMut(&str)) -> Result<RunOutput> {
    config.validate()?;
    fs::create_dir_all(&config.out_dir)?;
    match config.workflow {
        Workflow::Rates => cmd_rates(config),
        Workflow::Table1 => cmd_table1(config),
        Workflow::Simulate => cmd_simulate(config, progress),
        Workflow::Sweep => cmd_sweep(config),
        Workflow::Codegen => cmd_codegen(config),
    }
}

fn write(out: &mut Vec<PathBuf>, dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let p = dir.join(name);
    fs::write(&p, bytes)?;
    out.push(p);
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    s.push(b'\n');
    Ok(s)
}

fn cmd_rates(config: &RunConfig) -> Result<RunOutput> {
    let net = config.network()?;
    let reports = evaluate_all(&net, &config.solver)?;
    let mut files = Vec::new();
    write(&mut files, &config.out_dir, "rates.json", &json(&reports)?)?;
    let mut csv = Vec::new();
    write_reports_csv(&reports, &mut csv)?;
    write(&mut files, &config.out_dir, "rates.csv", &csv)?;
    let summary = reports
        .iter()
        .map(|r| format!("{:<32} {:.6}  ({})", r.evaluator, r.overall, r.description))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(RunOutput {
        files,
        audit_passed: true,
        summary,
    })
}

fn cmd_table1(config: &RunConfig) -> Result<RunOutput> {
    let t = config.table1.expect("validated");
    let table = table1(t.noise, t.distortion)?;
    let mut files = Vec::new();
    write(&mut files, &config.out_dir, "table1.json", &json(&table)?)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["attack", "capacity", "lower", "upper"]).map_err(io)?;
    for (name, b) in [("replacement", table.replacement), ("erasure", table.erasure)] {
        w.write_record([
            name.to_string(),
            format!("{:.12}", b.capacity),
            format!("{:.12}", b.lower),
            format!("{:.12}", b.upper),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    write(&mut files, &config.out_dir, "table1.csv", &bytes)?;
    let summary = format!(
        "N = {}, D = {}\n{:<12} {:>10} {:>10} {:>10}\n{:<12} {:>10.6} {:>10.6} {:>10.6}\n{:<12} {:>10.6} {:>10.6} {:>10.6}",
        t.noise,
        t.distortion,
        "attack",
        "capacity",
        "lower",
        "upper",
        "replacement",
        table.replacement.capacity,
        table.replacement.lower,
        table.replacement.upper,
        "erasure",
        table.erasure.capacity,
        table.erasure.lower,
        table.erasure.upper,
    );
    write(&mut files, &config.out_dir, "table1.txt", format!("{summary}\n").as_bytes())?;
    Ok(RunOutput {
        files,
        audit_passed: true,
        summary,
    })
}

/// Draws one code per discrete route. Route `j` uses its own RNG stream so
/// adding routes does not change earlier codes.
pub fn build_codes(net: &NetworkSpec, sim: &SimulateConfig, seed: u64) -> Result<Vec<Option<LinearCode>>> {
    let from_file = match &sim.code_file {
        Some(p) => Some(LinearCode::from_text(&fs::read_to_string(p)?)?),
        None => None,
    };
    let n = sim.block_length;
    net.routes()
        .iter()
        .enumerate()
        .map(|(j, route)| {
            if !route.is_discrete() {
                return Ok(None);
            }
            if let Some(c) = &from_file {
                return Ok(Some(c.clone()));
            }
            let q = route.input_alphabet().unwrap_or(2) as u32;
            let k = match (sim.k, sim.rate) {
                (Some(k), _) => k,
                (None, Some(r)) => ((r * n as f64).round() as usize).clamp(1, n),
                (None, None) => unreachable!("validated"),
            };
            let d = match sim.d_target {
                Some(d) => d,
                None => gv_distance(k, n, q)?,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX - j as u64);
            Ok(Some(varshamov_sample(k, n, q, d, &mut rng, sim.max_tries)?.code))
        })
        .collect()
}

#[derive(Serialize)]
struct CodeSummary {
    route: usize,
    q: u32,
    k: usize,
    n: usize,
    min_distance: Option<usize>,
}

#[derive(Serialize)]
struct SimulationSummary<'a> {
    codes: Vec<CodeSummary>,
    stats: &'a TrialStats,
}

fn cmd_simulate(config: &RunConfig, progress: &mut dyn FnMut(&str)) -> Result<RunOutput> {
    let net = config.network()?;
    let sim = config.simulate.as_ref().expect("validated");
    let seed = config.seed()?;
    let codes = build_codes(&net, sim, seed)?;
    let strategies = sim
        .strategies
        .clone()
        .unwrap_or_else(|| vec![sim.strategy.clone(); net.n_r()]);
    let trial = TrialConfig {
        network: net,
        codes,
        strategies,
        placements: match &sim.placement {
            Some(p) => PlacementSelection::One(p.clone()),
            None => PlacementSelection::All,
        },
        block_length: sim.block_length,
        trials: sim.trials,
        seed,
        keep_traces: sim.traces,
    };
    let stats = monte_carlo_with_progress(&trial, |done, total| {
        progress(&format!("placement {done}/{total} done"));
    })?;
    let mut files = Vec::new();
    let mut csv = Vec::new();
    write_stats_csv(&stats, &mut csv)?;
    write(&mut files, &config.out_dir, "simulation.csv", &csv)?;
    let codes = trial
        .codes
        .iter()
        .enumerate()
        .filter_map(|(j, c)| {
            c.as_ref().map(|c| CodeSummary {
                route: j,
                q: c.q(),
                k: c.k(),
                n: c.n(),
                min_distance: c.min_distance().ok(),
            })
        })
        .collect();
    write(
        &mut files,
        &config.out_dir,
        "simulation.json",
        &json(&SimulationSummary { codes, stats: &stats })?,
    )?;
    if sim.traces {
        let bounded: Vec<_> = stats
            .traces
            .iter()
            .map(|t| &t[..t.len().min(MAX_TRACE_TRIALS)])
            .collect();
        write(&mut files, &config.out_dir, "traces.json", &json(&bounded)?)?;
    }
    let worst = stats.worst();
    let summary = format!(
        "worst placement {} block error rate {:.6} [{:.6}, {:.6}] over {} trials; distortion audit {}",
        worst.placement,
        worst.error_rate,
        worst.wilson_low,
        worst.wilson_high,
        worst.trials,
        if stats.audit_passed { "passed" } else { "FAILED" }
    );
    Ok(RunOutput {
        files,
        audit_passed: stats.audit_passed,
        summary,
    })
}

/// Copy of `net` with the swept parameter set to `value`.
pub fn sweep_network(net: &NetworkSpec, sweep: &SweepConfig, value: f64) -> Result<NetworkSpec> {
    let routes = net
        .routes()
        .iter()
        .enumerate()
        .map(|(j, r)| {
            let moves = sweep.routes.as_ref().is_none_or(|list| list.contains(&j));
            let mut r = r.clone();
            if moves {
                match sweep.parameter {
                    SweepParameter::Distortion => r.distortion_limit = value,
                    SweepParameter::Power => match r.channel {
                        ChannelKind::Awgn { .. } => r.power = Some(value),
                        _ => return Err(Error::Config(format!("route {j} has no power to sweep"))),
                    },
                    SweepParameter::Noise => match &mut r.channel {
                        ChannelKind::Bsc { crossover } => *crossover = value,
                        ChannelKind::Bec { erasure } => *erasure = value,
                        ChannelKind::Awgn { variance } => *variance = value,
                        ChannelKind::General { .. } => {
                            return Err(Error::Config(format!("route {j} has no scalar noise to sweep")))
                        }
                    },
                }
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    NetworkSpec::new(net.n_a(), routes)
}

/// `(capacity, lower, upper)` from a report set, when all three exist.
fn bound_triple(reports: &[RateReport]) -> Option<(f64, f64, f64)> {
    let find = |prefix: &str| reports.iter().find(|r| r.evaluator.starts_with(prefix)).map(|r| r.overall);
    Some((find("cap_memoryless")?, find("low_foreseer")?, find("up_foreseer")?))
}

fn cmd_sweep(config: &RunConfig) -> Result<RunOutput> {
    let net = config.network()?;
    let sweep = config.sweep.as_ref().expect("validated");
    let param = match sweep.parameter {
        SweepParameter::Noise => "noise",
        SweepParameter::Distortion => "distortion",
        SweepParameter::Power => "power",
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record([
        "parameter",
        "value",
        "evaluator",
        "rate",
        "lower_le_upper",
        "upper_le_capacity",
    ])
    .map_err(io)?;
    let mut violations = 0;
    let values = sweep.values();
    for &v in &values {
        let reports = evaluate_all(&sweep_network(&net, sweep, v)?, &config.solver)?;
        let (a, b) = match bound_triple(&reports) {
            Some((cap, lo, up)) => {
                let (a, b) = (lo <= up + 1e-12, up <= cap + 1e-12);
                violations += (!a) as usize + (!b) as usize;
                (a.to_string(), b.to_string())
            }
            None => (String::new(), String::new()),
        };
        for r in &reports {
            w.write_record([
                param.to_string(),
                format!("{v:.12}"),
                r.evaluator.clone(),
                format!("{:.12}", r.overall),
                a.clone(),
                b.clone(),
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    let mut files = Vec::new();
    write(&mut files, &config.out_dir, "sweep.csv", &bytes)?;
    Ok(RunOutput {
        files,
        audit_passed: true,
        summary: format!("{} points of {param}; {violations} bound-ordering violations", values.len()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeReport {
    pub q: u32,
    pub k: usize,
    pub n: usize,
    pub rate: f64,
    pub d_target: usize,
    pub min_distance: usize,
    pub attempts: usize,
    /// `1 - H_q(d_target / n)`.
    pub gv_rate: f64,
    /// `gv_rate - rate`.
    pub gv_margin: f64,
}

fn cmd_codegen(config: &RunConfig) -> Result<RunOutput> {
    let c = config.codegen.as_ref().expect("validated");
    let d_target = match c.d_target {
        Some(d) => d,
        None => gv_distance(c.k, c.n, c.q)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed()?);
    let sample = varshamov_sample(c.k, c.n, c.q, d_target, &mut rng, c.max_tries)?;
    let code = &sample.code;
    let g = gv_rate(c.n, d_target, c.q);
    let report = CodeReport {
        q: c.q,
        k: c.k,
        n: c.n,
        rate: code.rate(),
        d_target,
        min_distance: code.min_distance()?,
        attempts: sample.attempts,
        gv_rate: g,
        gv_margin: g - code.rate(),
    };
    let mut files = Vec::new();
    write(&mut files, &config.out_dir, "generator.txt", code.to_text().as_bytes())?;
    write(&mut files, &config.out_dir, "code_report.json", &json(&report)?)?;
    Ok(RunOutput {
        files,
        audit_passed: true,
        summary: format!(
            "[{}, {}, {}] code over F_{} after {} attempts (target d >= {d_target})",
            c.n, c.k, report.min_distance, c.q, report.attempts
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIM: &str = r#"
workflow = "simulate"
seed = 5

[network]
n_r = 2
n_a = 1
routes = [{ kind = "bsc", N = 0.05, D = 0.1 }, { kind = "bsc", N = 0.05, D = 0.1 }]

[simulate]
block_length = 12
trials = 300
rate = 0.25
"#;

    fn with_out(text: &str, dir: &Path) -> RunConfig {
        let mut c = RunConfig::from_toml_str(text).unwrap();
        c.out_dir = dir.to_path_buf();
        c
    }

    #[test]
    fn config_round_trip() {
        let c = RunConfig::from_toml_str(SIM).unwrap();
        let again = RunConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.simulate.as_ref().unwrap().strategy, StrategySpec::WorstMemoryless);
    }

    #[test]
    fn simulate_is_byte_deterministic() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let ra = run(&with_out(SIM, a.path()), &mut |_| {}).unwrap();
        run(&with_out(SIM, b.path()), &mut |_| {}).unwrap();
        assert!(ra.audit_passed);
        for name in ["simulation.csv", "simulation.json"] {
            let x = fs::read(a.path().join(name)).unwrap();
            let y = fs::read(b.path().join(name)).unwrap();
            assert_eq!(x, y, "{name}");
        }
    }

    #[test]
    fn invalid_configs_fail_early() {
        let no_seed = SIM.replace("seed = 5", "");
        assert!(matches!(RunConfig::from_toml_str(&no_seed).unwrap().validate(), Err(Error::Config(_))));
        assert!(RunConfig::from_toml_str("workflow = \"plot\"").is_err());
        assert!(RunConfig::from_toml_str(&format!("{SIM}\nbogus = 1")).is_err());
        let sweep = r#"
workflow = "sweep"
[network]
n_r = 1
n_a = 1
routes = [{ kind = "bsc", N = 0.1, D = 0.1 }]
[sweep]
parameter = "distortion"
start = 0.0
stop = 0.2
steps = 1
"#;
        assert!(matches!(RunConfig::from_toml_str(sweep).unwrap().validate(), Err(Error::Config(_))));
        let missing_file = r#"
workflow = "rates"
network_file = "/nonexistent/net.toml"
"#;
        assert!(matches!(RunConfig::from_toml_str(missing_file).unwrap().validate(), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_emits_ordering_columns() {
        let dir = tempfile::tempdir().unwrap();
        let text = r#"
workflow = "sweep"
[network]
n_r = 1
n_a = 1
routes = [{ kind = "bsc", N = 0.02, D = 0.05 }]
[sweep]
parameter = "distortion"
start = 0.0
stop = 0.1
steps = 3
"#;
        let out = run(&with_out(text, dir.path()), &mut |_| {}).unwrap();
        let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 3 * 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("distortion,0.000000000000,cap_memoryless_replacement,"));
        assert!(out.summary.contains("0 bound-ordering violations"));
    }

    #[test]
    fn codegen_and_code_file() {
        let dir = tempfile::tempdir().unwrap();
        let text = "workflow = \"codegen\"\nseed = 1\n[codegen]\nq = 2\nk = 3\nn = 12\n";
        run(&with_out(text, dir.path()), &mut |_| {}).unwrap();
        let report: CodeReport =
            serde_json::from_slice(&fs::read(dir.path().join("code_report.json")).unwrap()).unwrap();
        assert_eq!(report.d_target, 3);
        assert!(report.min_distance >= 3);
        let code = LinearCode::from_text(&fs::read_to_string(dir.path().join("generator.txt")).unwrap()).unwrap();
        assert_eq!(code.min_distance().unwrap(), report.min_distance);

        let sim = SIM
            .replace("block_length = 12", &format!("block_length = 12\ncode_file = {:?}", dir.path().join("generator.txt")))
            .replace("rate = 0.25\n", "");
        let out_dir = tempfile::tempdir().unwrap();
        run(&with_out(&sim, out_dir.path()), &mut |_| {}).unwrap();
        let summary = fs::read_to_string(out_dir.path().join("simulation.json")).unwrap();
        assert!(summary.contains("\"k\": 3"));
    }

    #[test]
    fn gaussian_rates_infeasible() {
        let text = r#"
workflow = "rates"
[network]
n_r = 1
n_a = 1
routes = [{ kind = "awgn", N = 0.1, D = 1.0, P = 1.0 }]
"#;
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(run(&with_out(text, dir.path()), &mut |_| {}), Err(Error::Infeasible(_))));
    }

    #[test]
    fn table1_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let text = "workflow = \"table1\"\n[table1]\nN = 0.1\nD = 0.1\n";
        let out = run(&with_out(text, dir.path()), &mut |_| {}).unwrap();
        let csv = fs::read_to_string(dir.path().join("table1.csv")).unwrap();
        assert!(csv.starts_with("attack,capacity,lower,upper\nreplacement,0.3199"));
        assert!(out.summary.contains("erasure"));
    }
}
