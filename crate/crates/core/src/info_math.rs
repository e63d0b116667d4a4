//! Scalar information-theoretic primitives.
//!
//! All entropies and mutual informations are in bits, with the convention
//! `0 · log 0 = 0`. The q-ary entropy is the only function measured in a
//! different base (`log_q`).

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

const SUM_TOL: f64 = 1e-12;

/// Probability mass function over a finite alphabet `{0, .., len-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0 && **p <= 1.0)) {
            return Err(Error::InvalidDistribution(format!(
                "entry {p} outside [0, 1]"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {total}"
            )));
        }
        Ok(Pmf { probs })
    }

    /// Normalizes nonnegative weights into a pmf.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Pmf::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        Ok(Pmf {
            probs: vec![1.0 / size as f64; size],
        })
    }

    /// Bernoulli pmf `[1 - p, p]`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Pmf {
            probs: vec![1.0 - p, p],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.probs
    }
}

/// Row-stochastic matrix: one output pmf per input symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct CondPmf {
    rows: Vec<Pmf>,
}

impl CondPmf {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidDistribution("no rows".into()));
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidDistribution("ragged rows".into()));
        }
        let rows = rows.into_iter().map(Pmf::new).collect::<Result<_>>()?;
        Ok(CondPmf { rows })
    }

    pub fn identity(size: usize) -> Result<Self> {
        CondPmf::new(
            (0..size)
                .map(|i| (0..size).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    /// Binary symmetric channel with crossover `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        check_probability("crossover", p)?;
        CondPmf::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    pub fn rows(&self) -> &[Pmf] {
        &self.rows
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.rows[input].probs[output]
    }

    /// Cascade `self` followed by `next`.
    pub fn compose(&self, next: &CondPmf) -> Result<CondPmf> {
        if self.outputs() != next.inputs() {
            return Err(Error::AlphabetMismatch(format!(
                "cannot cascade {}-output law into {}-input law",
                self.outputs(),
                next.inputs()
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = vec![0.0; next.outputs()];
                for (mid, &p) in row.probs.iter().enumerate() {
                    for (o, &w) in next.rows[mid].probs.iter().enumerate() {
                        out[o] += p * w;
                    }
                }
                // renormalize: cascades accumulate round-off
                Pmf::from_weights(out)
            })
            .collect::<Result<_>>()?;
        Ok(CondPmf { rows })
    }

    /// Output distribution induced by `input`.
    pub fn output_pmf(&self, input: &Pmf) -> Result<Pmf> {
        self.check_input(input)?;
        let mut out = vec![0.0; self.outputs()];
        for (row, &px) in self.rows.iter().zip(input.probs()) {
            for (o, &w) in row.probs.iter().enumerate() {
                out[o] += px * w;
            }
        }
        Pmf::from_weights(out)
    }

    /// Joint law of (input, output).
    pub fn joint(&self, input: &Pmf) -> Result<JointPmf> {
        self.check_input(input)?;
        let table = self
            .rows
            .iter()
            .zip(input.probs())
            .map(|(row, &px)| row.probs.iter().map(|&w| px * w).collect())
            .collect();
        JointPmf::new(table)
    }

    fn check_input(&self, input: &Pmf) -> Result<()> {
        if input.len() != self.inputs() {
            return Err(Error::AlphabetMismatch(format!(
                "input pmf has {} symbols, law expects {}",
                input.len(),
                self.inputs()
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<Vec<f64>>> for CondPmf {
    type Error = Error;
    fn try_from(v: Vec<Vec<f64>>) -> Result<Self> {
        CondPmf::new(v)
    }
}

impl From<CondPmf> for Vec<Vec<f64>> {
    fn from(c: CondPmf) -> Self {
        c.rows.into_iter().map(|r| r.probs).collect()
    }
}

/// Joint pmf over a pair of alphabets, stored row-major by the first symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    table: Vec<Vec<f64>>,
}

impl JointPmf {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self> {
        if table.is_empty() || table[0].is_empty() {
            return Err(Error::InvalidDistribution("empty joint table".into()));
        }
        let width = table[0].len();
        if table.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidDistribution("ragged joint table".into()));
        }
        if table.iter().flatten().any(|p| !(*p >= 0.0 && *p <= 1.0)) {
            return Err(Error::InvalidDistribution(
                "joint entry outside [0, 1]".into(),
            ));
        }
        let total: f64 = table.iter().flatten().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "joint entries sum to {total}"
            )));
        }
        Ok(JointPmf { table })
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.table
    }

    pub fn first_marginal(&self) -> Vec<f64> {
        self.table.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn second_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.table[0].len()];
        for row in &self.table {
            for (o, p) in out.iter_mut().zip(row) {
                *o += p;
            }
        }
        out
    }

    pub fn entropy(&self) -> f64 {
        self.table.iter().map(|r| entropy(r)).sum()
    }
}

/// Shannon entropy in bits of a (not necessarily normalized) probability vector.
pub fn entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Binary entropy without range checking; callers guarantee `p ∈ [0, 1]`
/// up to round-off.
pub(crate) fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

pub fn binary_entropy(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(h2(p))
}

/// q-ary entropy `x log_q(q-1) - x log_q x - (1-x) log_q(1-x)`.
pub fn q_ary_entropy(x: f64, q: u64) -> Result<f64> {
    check_probability("x", x)?;
    if q < 2 {
        return Err(Error::OutOfRange {
            name: "q",
            value: q as f64,
            range: "q >= 2",
        });
    }
    Ok(hq(x, q))
}

pub(crate) fn hq(x: f64, q: u64) -> f64 {
    let q = q as f64;
    let lq = q.ln();
    let mut v = 0.0;
    if x > 0.0 {
        v += x * (q - 1.0).ln() / lq - x * x.ln() / lq;
    }
    if x < 1.0 {
        v -= (1.0 - x) * (1.0 - x).ln() / lq;
    }
    v
}

/// Crossover of two cascaded binary symmetric channels.
pub fn star(a: f64, b: f64) -> Result<f64> {
    check_probability("a", a)?;
    check_probability("b", b)?;
    Ok(star_unchecked(a, b))
}

pub(crate) fn star_unchecked(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// `I(X;Y)` in bits for a joint pmf.
pub fn mutual_information(joint: &JointPmf) -> f64 {
    let px = joint.first_marginal();
    let py = joint.second_marginal();
    let mut mi = 0.0;
    for (row, &pa) in joint.table.iter().zip(&px) {
        for (&pxy, &pb) in row.iter().zip(&py) {
            if pxy > 0.0 {
                mi += pxy * (pxy / (pa * pb)).log2();
            }
        }
    }
    mi.max(0.0)
}

/// Volume of a Hamming ball in `F_q^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallVolume {
    /// Exact count; present for `n <= 64`.
    pub exact: Option<BigUint>,
    pub log2: f64,
}

pub const EXACT_BALL_MAX_N: usize = 64;

/// `Σ_{l=0..r} C(n,l)(q-1)^l`, exact for `n <= 64` and log-domain beyond.
pub fn hamming_ball_volume(n: usize, r: usize, q: u64) -> Result<BallVolume> {
    if r > n {
        return Err(Error::OutOfRange {
            name: "r",
            value: r as f64,
            range: "0 <= r <= n",
        });
    }
    if q < 2 {
        return Err(Error::OutOfRange {
            name: "q",
            value: q as f64,
            range: "q >= 2",
        });
    }
    if n <= EXACT_BALL_MAX_N {
        let exact = exact_ball_volume(n, r, q);
        let log2 = biguint_log2(&exact);
        return Ok(BallVolume {
            exact: Some(exact),
            log2,
        });
    }
    // log-sum-exp over ln C(n,l) + l ln(q-1)
    let lq1 = ((q - 1) as f64).ln();
    let mut terms = Vec::with_capacity(r + 1);
    let mut ln_binom = 0.0f64;
    for l in 0..=r {
        if l > 0 {
            ln_binom += ((n - l + 1) as f64).ln() - (l as f64).ln();
        }
        terms.push(ln_binom + l as f64 * lq1);
    }
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = terms.iter().map(|t| (t - m).exp()).sum();
    Ok(BallVolume {
        exact: None,
        log2: (m + s.ln()) / std::f64::consts::LN_2,
    })
}

pub(crate) fn exact_ball_volume(n: usize, r: usize, q: u64) -> BigUint {
    let mut total = BigUint::zero();
    let mut binom = BigUint::one();
    let mut pow = BigUint::one();
    let q1 = BigUint::from(q - 1);
    for l in 0..=r {
        if l > 0 {
            binom = binom * BigUint::from(n - l + 1) / BigUint::from(l);
            pow *= &q1;
        }
        total += &binom * &pow;
    }
    total
}

pub(crate) fn biguint_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return x.to_u64().map(|v| (v as f64).log2()).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}
