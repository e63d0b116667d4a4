//! Random linear codes over prime fields: Varshamov sampling, exact minimum
//! distance, minimum-distance decoding and erasure decoding.
//!
//! Messages are vectors `u ∈ F_q^k`, indexed little-endian
//! (`index = Σ u_i q^i`). Codewords are `u G`.
//!
//! A code is usable when either `q^k <= 2^20` (the codebook is cached and
//! decoding scans it) or `G` has full rank and `q^(n-k) <= 2^20` (decoding
//! goes through a coset-leader table on the parity-check matrix).

mod field;
mod syndrome;

use std::fmt::Write as _;
use std::sync::OnceLock;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use field::{is_prime, FieldElement};

use crate::channel_model::Symbol;
use crate::error::{Error, Result};
use crate::info_math::{hamming_ball_volume, hq};
use field::{row_reduce, Fp};
use syndrome::SyndromeTable;

pub const MAX_FIELD: u32 = 251;
pub const MAX_BLOCK_LENGTH: usize = 64;
/// Largest cached codebook, and largest coset-leader table.
pub const MAX_TABLE: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderMode {
    Codebook,
    Syndrome,
}

#[derive(Debug, Clone)]
enum Codebook {
    /// Bit `j` of word `m` is symbol `j` of codeword `m`.
    Binary(Vec<u64>),
    /// Codeword `m` occupies `[m n, (m + 1) n)`.
    General(Vec<u8>),
}

#[derive(Debug, Clone)]
struct Solver {
    /// Information set: columns where `G` restricted is invertible.
    pivots: Vec<usize>,
    /// Inverse of `G` restricted to `pivots`.
    inverse: Vec<Vec<u32>>,
}

#[derive(Debug, Clone)]
pub struct LinearCode {
    q: u32,
    k: usize,
    n: usize,
    generator: Vec<Vec<Symbol>>,
    rank: usize,
    mode: DecoderMode,
    solver: Option<Solver>,
    parity: Option<Vec<Vec<u32>>>,
    codebook: OnceLock<Codebook>,
    syndromes: OnceLock<SyndromeTable>,
    min_distance: OnceLock<usize>,
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.generator == other.generator
    }
}

fn check_field(q: u32) -> Result<()> {
    if q > MAX_FIELD || !is_prime(q) {
        return Err(Error::InvalidCode(format!(
            "q = {q} must be a prime no larger than {MAX_FIELD}"
        )));
    }
    Ok(())
}

fn check_dims(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n || n > MAX_BLOCK_LENGTH {
        return Err(Error::InvalidCode(format!(
            "need 1 <= k <= n <= {MAX_BLOCK_LENGTH}, got k = {k}, n = {n}"
        )));
    }
    Ok(())
}

fn pow_u128(q: u32, e: usize) -> Option<u128> {
    (q as u128).checked_pow(e as u32)
}

impl LinearCode {
    pub fn new(q: u32, generator: Vec<Vec<Symbol>>) -> Result<Self> {
        check_field(q)?;
        let k = generator.len();
        let n = generator.first().map_or(0, |r| r.len());
        check_dims(k, n)?;
        if generator.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidCode("generator rows differ in length".into()));
        }
        if generator.iter().flatten().any(|&v| v >= q) {
            return Err(Error::InvalidCode(format!("generator entry outside F_{q}")));
        }
        if pow_u128(q, k).is_none_or(|m| m > u64::MAX as u128) {
            return Err(Error::InvalidCode(format!("q^k = {q}^{k} does not fit a message index")));
        }
        let f = Fp(q);
        let mut rref = generator.clone();
        let pivots = row_reduce(&mut rref, n, f);
        let rank = pivots.len();
        let codebook_ok = pow_u128(q, k).is_some_and(|m| m <= MAX_TABLE);
        let syndrome_ok = rank == k && pow_u128(q, n - k).is_some_and(|m| m <= MAX_TABLE);
        let mode = if codebook_ok {
            DecoderMode::Codebook
        } else if syndrome_ok {
            DecoderMode::Syndrome
        } else {
            return Err(Error::InvalidCode(format!(
                "q^k = {q}^{k} exceeds the codebook cap and the syndrome table \
                 (rank {rank}, q^(n-k) = {q}^{}) is unavailable",
                n - k
            )));
        };
        let (solver, parity) = if rank == k {
            // inverse of G restricted to the pivot columns
            let mut aug: Vec<Vec<u32>> = (0..k)
                .map(|i| {
                    let mut row: Vec<u32> = pivots.iter().map(|&c| generator[i][c]).collect();
                    row.extend((0..k).map(|t| (t == i) as u32));
                    row
                })
                .collect();
            row_reduce(&mut aug, k, f);
            let inverse = aug.into_iter().map(|r| r[k..].to_vec()).collect();
            // H = [-A^T | I] in the permuted coordinates of the RREF [I | A]
            let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
            let parity = free
                .iter()
                .map(|&c| {
                    let mut h = vec![0u32; n];
                    h[c] = 1;
                    for (i, &p) in pivots.iter().enumerate() {
                        h[p] = f.neg(rref[i][c]);
                    }
                    h
                })
                .collect();
            (Some(Solver { pivots, inverse }), Some(parity))
        } else {
            (None, None)
        };
        Ok(LinearCode {
            q,
            k,
            n,
            generator,
            rank,
            mode,
            solver,
            parity,
            codebook: OnceLock::new(),
            syndromes: OnceLock::new(),
            min_distance: OnceLock::new(),
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 * (self.q as f64).log2() / self.n as f64
    }

    pub fn generator(&self) -> &[Vec<Symbol>] {
        &self.generator
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn mode(&self) -> DecoderMode {
        self.mode
    }

    /// `q^k`.
    pub fn message_count(&self) -> u64 {
        (self.q as u64).pow(self.k as u32)
    }

    /// Parity-check matrix, present when `G` has full rank.
    pub fn parity_check(&self) -> Option<&[Vec<u32>]> {
        self.parity.as_deref()
    }

    pub fn message_from_index(&self, mut index: u64) -> Vec<Symbol> {
        (0..self.k)
            .map(|_| {
                let d = (index % self.q as u64) as Symbol;
                index /= self.q as u64;
                d
            })
            .collect()
    }

    pub fn index_of(&self, message: &[Symbol]) -> u64 {
        message
            .iter()
            .rev()
            .fold(0, |acc, &u| acc * self.q as u64 + u as u64)
    }

    pub fn encode(&self, message: &[Symbol]) -> Result<Vec<Symbol>> {
        if message.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                actual: message.len(),
            });
        }
        if message.iter().any(|&u| u >= self.q) {
            return Err(Error::AlphabetMismatch(format!("message symbol outside F_{}", self.q)));
        }
        let f = Fp(self.q);
        let mut c = vec![0u32; self.n];
        for (row, &u) in self.generator.iter().zip(message) {
            if u == 0 {
                continue;
            }
            for (cj, &g) in c.iter_mut().zip(row) {
                *cj = f.add(*cj, f.mul(u, g));
            }
        }
        Ok(c)
    }

    pub fn encode_index(&self, index: u64) -> Result<Vec<Symbol>> {
        if index >= self.message_count() {
            return Err(Error::OutOfRange {
                name: "message index",
                value: index as f64,
                range: "[0, q^k)",
            });
        }
        self.encode(&self.message_from_index(index))
    }

    fn codebook(&self) -> Result<&Codebook> {
        if self.mode != DecoderMode::Codebook {
            return Err(Error::SearchTooLarge {
                size: self.message_count() as u128,
                limit: MAX_TABLE,
            });
        }
        Ok(self.codebook.get_or_init(|| self.build_codebook()))
    }

    /// Codeword `m` is codeword `m - q^i` plus row `i`, with `i` the
    /// position of the most significant nonzero digit of `m`.
    fn build_codebook(&self) -> Codebook {
        let count = self.message_count() as usize;
        let f = Fp(self.q);
        if self.q == 2 {
            let rows: Vec<u64> = self.generator.iter().map(|r| pack(r)).collect();
            let mut words = vec![0u64; count];
            for m in 1..count {
                let i = usize::BITS as usize - 1 - m.leading_zeros() as usize;
                words[m] = words[m - (1 << i)] ^ rows[i];
            }
            Codebook::Binary(words)
        } else {
            let n = self.n;
            let mut flat = vec![0u8; count * n];
            let mut top = 0usize;
            let mut top_pow = 1usize;
            for m in 1..count {
                if m >= top_pow * self.q as usize {
                    top += 1;
                    top_pow *= self.q as usize;
                }
                let prev = m - top_pow;
                for j in 0..n {
                    let v = f.add(flat[prev * n + j] as u32, self.generator[top][j]);
                    flat[m * n + j] = v as u8;
                }
            }
            Codebook::General(flat)
        }
    }

    fn syndromes(&self) -> Result<&SyndromeTable> {
        let parity = self
            .parity
            .as_ref()
            .ok_or_else(|| Error::InvalidCode("generator is rank deficient".into()))?;
        Ok(self
            .syndromes
            .get_or_init(|| SyndromeTable::new(parity.clone(), self.q, self.n)))
    }

    /// Codeword for message `index`, read from the cached codebook when present.
    pub fn codeword(&self, index: u64) -> Result<Vec<Symbol>> {
        if self.mode == DecoderMode::Codebook {
            if index >= self.message_count() {
                return self.encode_index(index);
            }
            let m = index as usize;
            return Ok(match self.codebook()? {
                Codebook::Binary(words) => unpack(words[m], self.n),
                Codebook::General(flat) => {
                    flat[m * self.n..(m + 1) * self.n].iter().map(|&v| v as Symbol).collect()
                }
            });
        }
        self.encode_index(index)
    }

    /// Minimum Hamming weight over nonzero messages (0 if `G` is rank deficient).
    pub fn min_distance(&self) -> Result<usize> {
        if let Some(d) = self.min_distance.get() {
            return Ok(*d);
        }
        let d = match self.mode {
            DecoderMode::Codebook => match self.codebook()? {
                Codebook::Binary(words) => words[1..]
                    .iter()
                    .map(|w| w.count_ones() as usize)
                    .min()
                    .unwrap_or(self.n),
                Codebook::General(flat) => flat[self.n..]
                    .chunks(self.n)
                    .map(|c| c.iter().filter(|&&v| v != 0).count())
                    .min()
                    .unwrap_or(self.n),
            },
            DecoderMode::Syndrome => self.syndromes()?.min_distance(self.n),
        };
        Ok(*self.min_distance.get_or_init(|| d))
    }

    /// Closest other codeword to codeword `sent` as `(index, distance)`;
    /// ties go to the lowest index. Needs the cached codebook.
    pub fn nearest_rival(&self, sent: u64) -> Result<(u64, usize)> {
        if sent >= self.message_count() {
            return Err(Error::OutOfRange {
                name: "message index",
                value: sent as f64,
                range: "[0, q^k)",
            });
        }
        let s = sent as usize;
        let mut best = (usize::MAX, 0usize);
        match self.codebook()? {
            Codebook::Binary(words) => {
                for (m, w) in words.iter().enumerate() {
                    let d = (w ^ words[s]).count_ones() as usize;
                    if m != s && d < best.0 {
                        best = (d, m);
                    }
                }
            }
            Codebook::General(flat) => {
                let c = &flat[s * self.n..(s + 1) * self.n];
                for (m, w) in flat.chunks(self.n).enumerate() {
                    let d = w.iter().zip(c).filter(|(a, b)| a != b).count();
                    if m != s && d < best.0 {
                        best = (d, m);
                    }
                }
            }
        }
        Ok((best.1 as u64, best.0))
    }

    /// Covering radius of the parity-check coset table (syndrome mode).
    pub fn covering_radius(&self) -> Result<usize> {
        Ok(self.syndromes()?.covering_radius())
    }

    fn check_block(&self, block: &[Symbol]) -> Result<()> {
        if block.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: block.len(),
            });
        }
        Ok(())
    }

    /// Message whose codeword restricted to the information set equals `c`.
    fn solve_information_set(&self, c: &[Symbol]) -> Result<u64> {
        let solver = self
            .solver
            .as_ref()
            .ok_or_else(|| Error::InvalidCode("generator is rank deficient".into()))?;
        let f = Fp(self.q);
        let cp: Vec<u32> = solver.pivots.iter().map(|&p| c[p]).collect();
        let u: Vec<u32> = (0..self.k)
            .map(|i| {
                cp.iter()
                    .zip(&solver.inverse)
                    .fold(0, |acc, (x, row)| f.add(acc, f.mul(*x, row[i])))
            })
            .collect();
        Ok(self.index_of(&u))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# linear code q={} k={} n={}\n", self.q, self.k, self.n);
        for row in &self.generator {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// Parses the format written by [`LinearCode::to_text`]: a comment line
    /// carrying `q=<prime>` followed by one generator row per line.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut q = None;
        let mut rows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(comment) = line.strip_prefix('#') {
                for tok in comment.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("q=") {
                        q = Some(v.parse::<u32>().map_err(|e| {
                            Error::InvalidCode(format!("bad field size {v:?}: {e}"))
                        })?);
                    }
                }
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<Symbol>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::InvalidCode(format!("bad matrix entry in {line:?}: {e}")))?;
            rows.push(row);
        }
        let q = q.ok_or_else(|| Error::InvalidCode("missing `q=` header".into()))?;
        LinearCode::new(q, rows)
    }
}

fn pack(v: &[Symbol]) -> u64 {
    v.iter()
        .enumerate()
        .fold(0u64, |acc, (j, &b)| acc | ((b as u64 & 1) << j))
}

fn unpack(w: u64, n: usize) -> Vec<Symbol> {
    (0..n).map(|j| ((w >> j) & 1) as Symbol).collect()
}

/// `k x n` matrix with i.i.d. uniform entries over `F_q`.
pub fn random_generator<R: Rng + ?Sized>(k: usize, n: usize, q: u32, rng: &mut R) -> Result<Vec<Vec<Symbol>>> {
    check_field(q)?;
    check_dims(k, n)?;
    Ok((0..k)
        .map(|_| (0..n).map(|_| rng.random_range(0..q)).collect())
        .collect())
}

#[derive(Debug, Clone)]
pub struct VarshamovSample {
    pub code: LinearCode,
    pub attempts: usize,
}

/// `1 - H_q(d/n)`, in `q`-ary units.
pub fn gv_rate(n: usize, d: usize, q: u32) -> f64 {
    1.0 - hq(d as f64 / n as f64, q as u64)
}

/// Largest `d` with `q^k Vol_q(n, d-1) <= q^n / 2`, at least 1. At that
/// distance a uniformly random generator succeeds with probability at
/// least one half (union bound over nonzero messages).
pub fn gv_distance(k: usize, n: usize, q: u32) -> Result<usize> {
    check_field(q)?;
    check_dims(k, n)?;
    let slack = (n - k) as f64 * (q as f64).log2() - 1.0;
    let mut d = 1;
    while d < n && hamming_ball_volume(n, d, q as u64)?.log2 <= slack + 1e-12 {
        d += 1;
    }
    Ok(d)
}

/// Rejection-samples random generators until the minimum distance reaches
/// `d_target`.
pub fn varshamov_sample<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    q: u32,
    d_target: usize,
    rng: &mut R,
    max_tries: usize,
) -> Result<VarshamovSample> {
    check_field(q)?;
    check_dims(k, n)?;
    if d_target as f64 / n as f64 > 1.0 - 1.0 / q as f64 {
        return Err(Error::OutOfRange {
            name: "d_target / n",
            value: d_target as f64 / n as f64,
            range: "[0, 1 - 1/q]",
        });
    }
    for attempt in 1..=max_tries {
        let g = random_generator(k, n, q, rng)?;
        let code = match LinearCode::new(q, g) {
            Ok(c) => c,
            // rank-deficient draw of a code that needs the syndrome decoder
            Err(Error::InvalidCode(_)) if pow_u128(q, k).is_none_or(|m| m > MAX_TABLE) => continue,
            Err(e) => return Err(e),
        };
        if code.min_distance()? >= d_target {
            return Ok(VarshamovSample {
                code,
                attempts: attempt,
            });
        }
    }
    Err(Error::VarshamovExhausted {
        d_target,
        tries: max_tries,
        rate: k as f64 / n as f64,
        gv_rate: gv_rate(n, d_target, q),
    })
}

/// Index of the nearest codeword in Hamming distance. In codebook mode ties
/// go to the lowest index; in syndrome mode the coset leader found first
/// by breadth-first search decides.
pub fn min_distance_decode(received: &[Symbol], code: &LinearCode) -> Result<u64> {
    code.check_block(received)?;
    if received.iter().any(|&v| v >= code.q) {
        return Err(Error::AlphabetMismatch(format!(
            "received symbol outside F_{} (erasures need erasure_decode)",
            code.q
        )));
    }
    match code.mode {
        DecoderMode::Codebook => Ok(match code.codebook()? {
            Codebook::Binary(words) => {
                let r = pack(received);
                let mut best = (u32::MAX, 0usize);
                for (m, w) in words.iter().enumerate() {
                    let d = (w ^ r).count_ones();
                    if d < best.0 {
                        best = (d, m);
                    }
                }
                best.1 as u64
            }
            Codebook::General(flat) => {
                let mut best = (usize::MAX, 0usize);
                for (m, c) in flat.chunks(code.n).enumerate() {
                    let d = c
                        .iter()
                        .zip(received)
                        .filter(|(a, b)| **a as Symbol != **b)
                        .count();
                    if d < best.0 {
                        best = (d, m);
                    }
                }
                best.1 as u64
            }
        }),
        DecoderMode::Syndrome => {
            let table = code.syndromes()?;
            let f = Fp(code.q);
            let mut c = received.to_vec();
            for (j, a) in table.leader(table.syndrome(received)) {
                c[j] = f.sub(c[j], a);
            }
            code.solve_information_set(&c)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ErasureDecoding {
    Unique { message: u64 },
    /// The surviving columns have rank below `k`; `consistent` messages fit.
    Ambiguous { rank: usize, consistent: BigUint },
    /// No codeword agrees with the unerased symbols.
    Inconsistent,
}

/// Solves `u G_S = r_S` over the unerased positions `S`. Symbols equal to
/// `q` are erasures.
pub fn erasure_decode(received: &[Symbol], code: &LinearCode) -> Result<ErasureDecoding> {
    code.check_block(received)?;
    if received.iter().any(|&v| v > code.q) {
        return Err(Error::AlphabetMismatch(format!(
            "received symbol outside F_{} plus the erasure",
            code.q
        )));
    }
    let k = code.k;
    let mut system: Vec<Vec<u32>> = (0..code.n)
        .filter(|&j| received[j] != code.q)
        .map(|j| {
            let mut row: Vec<u32> = code.generator.iter().map(|g| g[j]).collect();
            row.push(received[j]);
            row
        })
        .collect();
    let pivots = row_reduce(&mut system, k, Fp(code.q));
    let rank = pivots.len();
    if system[rank..].iter().any(|row| row[k] != 0) {
        return Ok(ErasureDecoding::Inconsistent);
    }
    if rank < k {
        return Ok(ErasureDecoding::Ambiguous {
            rank,
            consistent: BigUint::from(code.q).pow((k - rank) as u32),
        });
    }
    let u: Vec<u32> = (0..k).map(|i| system[i][k]).collect();
    Ok(ErasureDecoding::Unique {
        message: code.index_of(&u),
    })
}

#[cfg(test)]
mod tests;
