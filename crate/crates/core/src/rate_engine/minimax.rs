//! Numerical evaluation of the memoryless capacity for small discrete
//! alphabets: `sup_p min_s inf_q Σ_j I(X_j; Y_j)` (no CSI) and
//! `min_s sup_p inf_q Σ_j I(X_j; Y_j)` (CSI at the transmitter).
//!
//! The inner infimum runs over adversary conditionals `q(x_a|x)` whose
//! expected distortion is at most `s(j) D_j`. For a fixed input law the
//! end-to-end channel is linear in `q`, and mutual information is convex in
//! the channel, so the inner problem is a convex program over a polytope
//! (a product of simplices cut by one half-space). It is solved by
//! projected gradient descent from several deterministic starts; the
//! projection onto the polytope is exact (simplex projections with a
//! bisected Lagrange multiplier for the budget).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{finish, PlacementRate, RateReport};
use crate::channel_model::{DistortionMeasure, NetworkSpec, PlacementVector, RouteSpec};
use crate::error::{Error, Result};
use crate::info_math::{CondPmf, Pmf};

/// Largest input alphabet handled by the solver.
pub const MAX_SOLVER_ALPHABET: usize = 5;

/// Channel state information available at the transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Csi {
    None,
    Tx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Points per axis of the input grid (binary inputs use exactly this
    /// many points on `[0, 1]`).
    pub grid_resolution: usize,
    /// Cap on the simplex lattice size for inputs with more than two symbols.
    pub max_simplex_points: usize,
    /// Random starts in addition to the identity and uniform-mixing starts.
    pub random_starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop when no entry of the adversary law moves by more than this.
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_resolution: 401,
            max_simplex_points: 3000,
            random_starts: 1,
            seed: 0x5eed,
            max_iterations: 20_000,
            tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerInf {
    pub value: f64,
    /// Minimizing adversary law `x -> x_a`.
    pub adversary: CondPmf,
}

/// Both optimization orders over the same grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimaxReport {
    pub no_csi: RateReport,
    pub tx_csi: RateReport,
}

/// `inf I(X;Y)` over adversary laws with expected distortion at most `budget`.
pub fn inner_inf_mi(
    channel: &CondPmf,
    input: &Pmf,
    measure: &DistortionMeasure,
    budget: f64,
) -> Result<InnerInf> {
    inner_inf_with(channel, input, measure, budget, &SolverOptions::default())
}

pub(crate) fn inner_inf_with(
    channel: &CondPmf,
    input: &Pmf,
    measure: &DistortionMeasure,
    budget: f64,
    opts: &SolverOptions,
) -> Result<InnerInf> {
    let problem = InnerProblem::new(channel, input, measure, budget)?;
    let (value, w) = problem.solve(opts);
    Ok(InnerInf {
        value,
        adversary: CondPmf::new(w.into_iter().map(renormalize).collect())?,
    })
}

fn renormalize(mut row: Vec<f64>) -> Vec<f64> {
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= s);
    row
}

struct InnerProblem {
    px: Vec<f64>,
    /// Distortion `d(x, x_a)`; infinite entries are forbidden.
    cost: Vec<Vec<f64>>,
    allowed: Vec<Vec<bool>>,
    chan: Vec<Vec<f64>>,
    budget: f64,
}

type Law = Vec<Vec<f64>>;

impl InnerProblem {
    fn new(channel: &CondPmf, input: &Pmf, measure: &DistortionMeasure, budget: f64) -> Result<Self> {
        let cost = measure.matrix().ok_or_else(|| Error::NotApplicable {
            evaluator: "inner_inf_mi",
            reason: "needs a discrete distortion measure".into(),
        })?;
        let nx = cost.len();
        if nx > MAX_SOLVER_ALPHABET {
            return Err(Error::NotApplicable {
                evaluator: "inner_inf_mi",
                reason: format!("input alphabet {nx} exceeds {MAX_SOLVER_ALPHABET}"),
            });
        }
        if input.len() != nx {
            return Err(Error::AlphabetMismatch(format!(
                "input pmf has {} symbols, measure expects {nx}",
                input.len()
            )));
        }
        if channel.inputs() != cost[0].len() {
            return Err(Error::AlphabetMismatch(format!(
                "channel has {} inputs, adversary alphabet has {}",
                channel.inputs(),
                cost[0].len()
            )));
        }
        if !(budget >= 0.0) {
            return Err(Error::OutOfRange {
                name: "budget",
                value: budget,
                range: "budget >= 0",
            });
        }
        let allowed = cost
            .iter()
            .map(|r| r.iter().map(|c| c.is_finite()).collect())
            .collect();
        Ok(InnerProblem {
            px: input.probs().to_vec(),
            cost,
            allowed,
            chan: channel.rows().iter().map(|r| r.probs().to_vec()).collect(),
            budget,
        })
    }

    fn nx(&self) -> usize {
        self.px.len()
    }

    fn na(&self) -> usize {
        self.chan.len()
    }

    fn ny(&self) -> usize {
        self.chan[0].len()
    }

    /// Mutual information and its gradient with respect to the adversary law.
    fn objective(&self, w: &Law) -> (f64, Law) {
        let (nx, na, ny) = (self.nx(), self.na(), self.ny());
        let mut v = vec![vec![0.0; ny]; nx];
        for x in 0..nx {
            for a in 0..na {
                let wa = w[x][a];
                if wa == 0.0 {
                    continue;
                }
                for y in 0..ny {
                    v[x][y] += wa * self.chan[a][y];
                }
            }
        }
        let mut q = vec![0.0; ny];
        for x in 0..nx {
            for y in 0..ny {
                q[y] += self.px[x] * v[x][y];
            }
        }
        let mut value = 0.0;
        let mut gv = vec![vec![0.0; ny]; nx];
        for x in 0..nx {
            if self.px[x] == 0.0 {
                continue;
            }
            for y in 0..ny {
                if q[y] <= 0.0 {
                    continue;
                }
                let ratio = v[x][y] / q[y];
                if v[x][y] > 0.0 {
                    let l = ratio.log2();
                    value += self.px[x] * v[x][y] * l;
                    gv[x][y] = self.px[x] * l.max(-60.0);
                } else {
                    gv[x][y] = self.px[x] * -60.0;
                }
            }
        }
        let mut gw = vec![vec![0.0; na]; nx];
        for x in 0..nx {
            for a in 0..na {
                gw[x][a] = (0..ny).map(|y| self.chan[a][y] * gv[x][y]).sum();
            }
        }
        (value.max(0.0), gw)
    }

    fn expected_cost(&self, w: &Law) -> f64 {
        let mut c = 0.0;
        for x in 0..self.nx() {
            if self.px[x] == 0.0 {
                continue;
            }
            for a in 0..self.na() {
                if w[x][a] > 0.0 {
                    c += self.px[x] * w[x][a] * self.cost[x][a];
                }
            }
        }
        c
    }

    fn shifted_projection(&self, z: &Law, lambda: f64) -> Law {
        (0..self.nx())
            .map(|x| {
                let shifted: Vec<f64> = (0..self.na())
                    .map(|a| {
                        if self.allowed[x][a] {
                            z[x][a] - lambda * self.px[x] * self.cost[x][a]
                        } else {
                            0.0
                        }
                    })
                    .collect();
                project_simplex(&shifted, &self.allowed[x])
            })
            .collect()
    }

    /// Euclidean projection onto the feasible polytope.
    fn project(&self, z: &Law) -> Law {
        let free = self.shifted_projection(z, 0.0);
        if self.expected_cost(&free) <= self.budget {
            return free;
        }
        let mut hi = 1.0;
        let mut w_hi = self.shifted_projection(z, hi);
        let mut guard = 0;
        while self.expected_cost(&w_hi) > self.budget && guard < 200 {
            hi *= 2.0;
            w_hi = self.shifted_projection(z, hi);
            guard += 1;
        }
        let mut lo = 0.0;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            let w = self.shifted_projection(z, mid);
            if self.expected_cost(&w) > self.budget {
                lo = mid;
            } else {
                hi = mid;
                w_hi = w;
            }
            if hi - lo <= 1e-15 * hi.max(1.0) {
                break;
            }
        }
        w_hi
    }

    fn identity_start(&self) -> Law {
        (0..self.nx())
            .map(|x| (0..self.na()).map(|a| if self.cost[x][a] == 0.0 && a == zero_cost_index(&self.cost[x]) { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    fn mixing_start(&self) -> Law {
        let id = self.identity_start();
        let uniform: Law = self
            .allowed
            .iter()
            .map(|row| {
                let k = row.iter().filter(|b| **b).count() as f64;
                row.iter().map(|b| if *b { 1.0 / k } else { 0.0 }).collect()
            })
            .collect();
        let c = self.expected_cost(&uniform);
        let t = if c > 0.0 { (self.budget / c).min(1.0) } else { 1.0 };
        id.iter()
            .zip(&uniform)
            .map(|(r, u)| r.iter().zip(u).map(|(a, b)| (1.0 - t) * a + t * b).collect())
            .collect()
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Law {
        let z: Law = self
            .allowed
            .iter()
            .map(|row| {
                let raw: Vec<f64> = row
                    .iter()
                    .map(|b| if *b { -rng.random::<f64>().max(1e-300).ln() } else { 0.0 })
                    .collect();
                let s: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / s).collect()
            })
            .collect();
        self.project(&z)
    }

    fn descend(&self, start: Law, opts: &SolverOptions) -> (f64, Law) {
        let mut w = start;
        let (mut f, mut g) = self.objective(&w);
        let mut step = 1.0;
        let mut stalled = 0;
        for _ in 0..opts.max_iterations {
            let mut accepted = None;
            while step > 1e-18 {
                let z: Law = w
                    .iter()
                    .zip(&g)
                    .map(|(r, gr)| r.iter().zip(gr).map(|(a, b)| a - step * b).collect())
                    .collect();
                let wn = self.project(&z);
                let (fn_, gn) = self.objective(&wn);
                let mut lin = 0.0;
                let mut sq = 0.0;
                for x in 0..self.nx() {
                    for a in 0..self.na() {
                        let d = wn[x][a] - w[x][a];
                        lin += g[x][a] * d;
                        sq += d * d;
                    }
                }
                if fn_ <= f + lin + sq / (2.0 * step) + 1e-15 {
                    accepted = Some((wn, fn_, gn, sq));
                    break;
                }
                step *= 0.5;
            }
            let Some((wn, fn_, gn, sq)) = accepted else {
                break;
            };
            let moved = wn
                .iter()
                .zip(&w)
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
                .fold(0.0, f64::max);
            // the minimizer set can be a flat face; stop once the value stalls
            if f - fn_ <= 1e-15 * f.max(1.0) {
                stalled += 1;
            } else {
                stalled = 0;
            }
            w = wn;
            f = fn_;
            g = gn;
            step = (step * 2.0).min(1e6);
            if moved <= opts.tolerance || sq == 0.0 || stalled >= 3 {
                break;
            }
        }
        (f, w)
    }

    fn solve(&self, opts: &SolverOptions) -> (f64, Law) {
        let mut starts = vec![self.identity_start(), self.project(&self.mixing_start())];
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.random_starts {
            starts.push(self.random_start(&mut rng));
        }
        starts
            .into_iter()
            .map(|s| self.descend(s, opts))
            .fold(None, |best: Option<(f64, Law)>, cand| match best {
                Some(b) if b.0 <= cand.0 => Some(b),
                _ => Some(cand),
            })
            .expect("at least one start")
    }
}

fn zero_cost_index(row: &[f64]) -> usize {
    row.iter().position(|c| *c == 0.0).unwrap_or(0)
}

/// Projection of `z` onto the probability simplex supported on `allowed`.
fn project_simplex(z: &[f64], allowed: &[bool]) -> Vec<f64> {
    let mut u: Vec<f64> = z
        .iter()
        .zip(allowed)
        .filter(|(_, a)| **a)
        .map(|(v, _)| *v)
        .collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, v) in u.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    z.iter()
        .zip(allowed)
        .map(|(v, a)| if *a { (v - theta).max(0.0) } else { 0.0 })
        .collect()
}

/// Input lattice `{k / m}` over the simplex of `size` symbols.
fn simplex_grid(size: usize, resolution: usize, max_points: usize) -> Vec<Vec<f64>> {
    let mut divisions = resolution - 1;
    if size > 2 {
        while divisions > 1 && lattice_size(size, divisions) > max_points as u128 {
            divisions -= 1;
        }
    }
    let mut out = Vec::new();
    let mut parts = vec![0usize; size];
    compositions(divisions, 0, &mut parts, &mut out, divisions);
    out
}

fn lattice_size(size: usize, m: usize) -> u128 {
    // C(m + size - 1, size - 1)
    let (n, k) = ((m + size - 1) as u128, (size - 1) as u128);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn compositions(remaining: usize, idx: usize, parts: &mut [usize], out: &mut Vec<Vec<f64>>, m: usize) {
    if idx == parts.len() - 1 {
        parts[idx] = remaining;
        out.push(parts.iter().map(|&p| p as f64 / m as f64).collect());
        return;
    }
    // Descending first part: for binary inputs the grid is Pr(X=1) = 0, 1/m, ..
    for k in (0..=remaining).rev() {
        parts[idx] = k;
        compositions(remaining - k, idx + 1, parts, out, m);
    }
}

#[derive(Clone)]
struct RouteTable {
    /// `values[g][s]` for grid point `g` and attack flag `s`.
    entries: Vec<[InnerInf; 2]>,
}

struct Prepared<'a> {
    spec: &'a NetworkSpec,
    opts: &'a SolverOptions,
    grids: Vec<Vec<Vec<f64>>>,
    tables: Vec<RouteTable>,
}

fn route_parts(route: &RouteSpec) -> Result<(CondPmf, DistortionMeasure)> {
    let law = route.law().ok_or_else(|| Error::NotApplicable {
        evaluator: "cap_memoryless_general",
        reason: "Gaussian routes have no finite alphabet".into(),
    })?;
    Ok((law, route.measure()))
}

fn evaluate_route(route: &RouteSpec, input: &[f64], attacked: bool, opts: &SolverOptions) -> Result<InnerInf> {
    let (law, measure) = route_parts(route)?;
    let budget = if attacked { route.distortion_limit } else { 0.0 };
    inner_inf_with(&law, &Pmf::from_weights(input.to_vec())?, &measure, budget, opts)
}

impl<'a> Prepared<'a> {
    fn new(spec: &'a NetworkSpec, opts: &'a SolverOptions) -> Result<Self> {
        if opts.grid_resolution < 2 {
            return Err(Error::OutOfRange {
                name: "grid_resolution",
                value: opts.grid_resolution as f64,
                range: ">= 2",
            });
        }
        for (j, r) in spec.routes().iter().enumerate() {
            let (law, measure) = route_parts(r)?;
            let nx = measure.input_alphabet().unwrap_or(0);
            if nx > MAX_SOLVER_ALPHABET || law.outputs() > MAX_SOLVER_ALPHABET + 1 {
                return Err(Error::NotApplicable {
                    evaluator: "cap_memoryless_general",
                    reason: format!("route {j} alphabet too large for the solver"),
                });
            }
        }
        let routes = spec.routes();
        // identical routes share one table
        let mut owner = Vec::with_capacity(routes.len());
        for (j, r) in routes.iter().enumerate() {
            owner.push(routes[..j].iter().position(|o| o == r).unwrap_or(j));
        }
        let mut grids = Vec::new();
        let mut unique_tables: Vec<Option<RouteTable>> = vec![None; routes.len()];
        for (j, r) in routes.iter().enumerate() {
            let nx = r.input_alphabet().unwrap_or(2);
            let grid = simplex_grid(nx, opts.grid_resolution, opts.max_simplex_points);
            if owner[j] == j {
                let attacked_needed = spec.n_a() > 0;
                let entries = grid
                    .par_iter()
                    .map(|p| {
                        let clean = evaluate_route(r, p, false, opts)?;
                        let attacked = if attacked_needed {
                            evaluate_route(r, p, true, opts)?
                        } else {
                            clean.clone()
                        };
                        Ok([clean, attacked])
                    })
                    .collect::<Result<Vec<_>>>()?;
                unique_tables[j] = Some(RouteTable { entries });
            }
            grids.push(grid);
        }
        let tables = owner
            .iter()
            .map(|&o| unique_tables[o].clone().expect("owner table computed"))
            .collect();
        Ok(Prepared {
            spec,
            opts,
            grids,
            tables,
        })
    }

    fn value(&self, j: usize, g: usize, attacked: bool) -> f64 {
        self.tables[j].entries[g][attacked as usize].value
    }

    fn is_binary(&self, j: usize) -> bool {
        self.grids[j][0].len() == 2
    }

    fn step(&self, j: usize) -> f64 {
        1.0 / (self.grids[j].len() - 1) as f64
    }

    /// Golden-section search on `Pr(X_j = 1)` within one grid step of `center`.
    fn refine<F>(&self, j: usize, center: f64, mut f: F) -> Result<(f64, f64)>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let h = self.step(j);
        let (mut a, mut b) = ((center - h).max(0.0), (center + h).min(1.0));
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        let mut fc = f(c)?;
        let mut fd = f(d)?;
        for _ in 0..40 {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - r * (b - a);
                fc = f(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + r * (b - a);
                fd = f(d)?;
            }
        }
        Ok(if fc >= fd { (c, fc) } else { (d, fd) })
    }

    fn tx_csi(&self) -> Result<RateReport> {
        let placements = self.spec.placements()?;
        let mut rows = Vec::new();
        let mut chosen: Vec<Vec<(Vec<f64>, InnerInf)>> = Vec::new();
        for placement in &placements {
            let mut terms = Vec::new();
            let mut picks = Vec::new();
            for (j, route) in self.spec.routes().iter().enumerate() {
                let s = placement.attacked(j);
                let g = argmax((0..self.grids[j].len()).map(|g| self.value(j, g, s)));
                let mut best_p = self.grids[j][g].clone();
                let mut best = self.tables[j].entries[g][s as usize].clone();
                if self.is_binary(j) {
                    let (p1, v) = self.refine(j, best_p[1], |p1| {
                        Ok(evaluate_route(route, &[1.0 - p1, p1], s, self.opts)?.value)
                    })?;
                    if v > best.value {
                        best_p = vec![1.0 - p1, p1];
                        best = evaluate_route(route, &best_p, s, self.opts)?;
                    }
                }
                terms.push(best.value);
                picks.push((best_p, best));
            }
            rows.push(PlacementRate {
                placement: placement.clone(),
                value: terms.iter().sum(),
                route_terms: terms,
            });
            chosen.push(picks);
        }
        let mut report = finish(
            "cap_memoryless_general_tx_csi",
            "memoryless capacity, numerical min-sup-inf (CSI at transmitter)",
            rows,
        );
        let idx = placements.iter().position(|p| *p == report.argmin).unwrap_or(0);
        attach_laws(&mut report, &chosen[idx])?;
        Ok(report)
    }

    fn shared_objective(&self, picks: &[usize], placements: &[PlacementVector]) -> f64 {
        placements
            .iter()
            .map(|s| {
                (0..picks.len())
                    .map(|j| self.value(j, picks[j], s.attacked(j)))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn no_csi(&self) -> Result<RateReport> {
        let placements = self.spec.placements()?;
        let n_r = self.spec.n_r();
        let sizes: Vec<usize> = self.grids.iter().map(|g| g.len()).collect();
        let total: f64 = sizes.iter().map(|&s| s as f64).product();
        let mut picks: Vec<usize>;
        if total <= 2e6 {
            picks = vec![0; n_r];
            let mut best = (f64::NEG_INFINITY, picks.clone());
            let mut idx = vec![0usize; n_r];
            loop {
                let v = self.shared_objective(&idx, &placements);
                if v > best.0 {
                    best = (v, idx.clone());
                }
                let mut k = n_r;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < sizes[k] {
                        break;
                    }
                    idx[k] = 0;
                    if k == 0 {
                        k = usize::MAX;
                        break;
                    }
                }
                if k == usize::MAX {
                    break;
                }
            }
            picks = best.1;
        } else {
            picks = (0..n_r)
                .map(|j| argmax((0..sizes[j]).map(|g| self.value(j, g, true))))
                .collect();
            for _ in 0..50 {
                let mut changed = false;
                for j in 0..n_r {
                    let mut trial = picks.clone();
                    let g = argmax((0..sizes[j]).map(|g| {
                        trial[j] = g;
                        self.shared_objective(&trial, &placements)
                    }));
                    if g != picks[j] {
                        let mut cand = picks.clone();
                        cand[j] = g;
                        if self.shared_objective(&cand, &placements)
                            > self.shared_objective(&picks, &placements)
                        {
                            picks = cand;
                            changed = true;
                        }
                    }
                }
                if !changed {
                    break;
                }
            }
        }

        // per-route input laws and the corresponding inner solutions
        let mut inputs: Vec<Vec<f64>> = (0..n_r).map(|j| self.grids[j][picks[j]].clone()).collect();
        let mut clean: Vec<InnerInf> = (0..n_r).map(|j| self.tables[j].entries[picks[j]][0].clone()).collect();
        let mut hit: Vec<InnerInf> = (0..n_r).map(|j| self.tables[j].entries[picks[j]][1].clone()).collect();
        let objective = |clean: &[InnerInf], hit: &[InnerInf]| {
            placements
                .iter()
                .map(|s| {
                    (0..n_r)
                        .map(|j| if s.attacked(j) { hit[j].value } else { clean[j].value })
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
        };
        for j in 0..n_r {
            if !self.is_binary(j) {
                continue;
            }
            let route = &self.spec.routes()[j];
            let base = objective(&clean, &hit);
            let (p1, v) = self.refine(j, inputs[j][1], |p1| {
                let mut c = clean.clone();
                let mut h = hit.clone();
                c[j] = evaluate_route(route, &[1.0 - p1, p1], false, self.opts)?;
                h[j] = if self.spec.n_a() > 0 {
                    evaluate_route(route, &[1.0 - p1, p1], true, self.opts)?
                } else {
                    c[j].clone()
                };
                Ok(objective(&c, &h))
            })?;
            if v > base {
                inputs[j] = vec![1.0 - p1, p1];
                clean[j] = evaluate_route(route, &inputs[j], false, self.opts)?;
                hit[j] = if self.spec.n_a() > 0 {
                    evaluate_route(route, &inputs[j], true, self.opts)?
                } else {
                    clean[j].clone()
                };
            }
        }
        let rows = placements
            .iter()
            .map(|s| {
                let terms: Vec<f64> = (0..n_r)
                    .map(|j| if s.attacked(j) { hit[j].value } else { clean[j].value })
                    .collect();
                PlacementRate {
                    placement: s.clone(),
                    value: terms.iter().sum(),
                    route_terms: terms,
                }
            })
            .collect();
        let mut report = finish(
            "cap_memoryless_general_no_csi",
            "memoryless capacity, numerical sup-min-inf (no CSI)",
            rows,
        );
        let picks: Vec<(Vec<f64>, InnerInf)> = (0..n_r)
            .map(|j| {
                let law = if report.argmin.attacked(j) { &hit[j] } else { &clean[j] };
                (inputs[j].clone(), law.clone())
            })
            .collect();
        attach_laws(&mut report, &picks)?;
        Ok(report)
    }
}

fn attach_laws(report: &mut RateReport, picks: &[(Vec<f64>, InnerInf)]) -> Result<()> {
    report.input = Some(
        picks
            .iter()
            .map(|(p, _)| Pmf::from_weights(p.clone()))
            .collect::<Result<_>>()?,
    );
    report.adversary = Some(picks.iter().map(|(_, i)| i.adversary.clone()).collect());
    Ok(())
}

/// Index of the first maximum.
fn argmax<I: Iterator<Item = f64>>(values: I) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

/// Memoryless capacity by numerical minimax in the requested CSI order.
pub fn cap_memoryless_general(spec: &NetworkSpec, csi: Csi, opts: &SolverOptions) -> Result<RateReport> {
    let prepared = Prepared::new(spec, opts)?;
    match csi {
        Csi::None => prepared.no_csi(),
        Csi::Tx => prepared.tx_csi(),
    }
}

/// Both CSI orders from one shared table of inner solutions.
pub fn cap_memoryless_general_both(spec: &NetworkSpec, opts: &SolverOptions) -> Result<MinimaxReport> {
    let prepared = Prepared::new(spec, opts)?;
    Ok(MinimaxReport {
        no_csi: prepared.no_csi()?,
        tx_csi: prepared.tx_csi()?,
    })
}
