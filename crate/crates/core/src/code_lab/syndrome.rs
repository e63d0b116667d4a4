//! Parity-check decoding for codes whose codebook is too large to cache.
//! Syndromes are stored as base-`q` integers, digit `t` = row `t` of `H`.

use std::collections::VecDeque;

use super::field::Fp;
use crate::channel_model::Symbol;

const UNSEEN: u8 = u8::MAX;

#[derive(Debug, Clone)]
pub(crate) struct SyndromeTable {
    q: u32,
    r: usize,
    h: Vec<Vec<u32>>,
    /// `col[j][a]`: syndrome of `a e_j`.
    col: Vec<Vec<usize>>,
    /// Coset leader weight per syndrome.
    dist: Vec<u8>,
    parent: Vec<u32>,
    step: Vec<(u8, u8)>,
}

fn digits(mut s: usize, q: u32, r: usize) -> Vec<u32> {
    (0..r)
        .map(|_| {
            let d = (s % q as usize) as u32;
            s /= q as usize;
            d
        })
        .collect()
}

fn from_digits(d: &[u32], q: u32) -> usize {
    d.iter().rev().fold(0, |acc, &x| acc * q as usize + x as usize)
}

impl SyndromeTable {
    pub fn new(h: Vec<Vec<u32>>, q: u32, n: usize) -> Self {
        let r = h.len();
        let f = Fp(q);
        let col = (0..n)
            .map(|j| {
                (0..q)
                    .map(|a| {
                        let d: Vec<u32> = (0..r).map(|t| f.mul(a, h[t][j])).collect();
                        from_digits(&d, q)
                    })
                    .collect()
            })
            .collect();
        let size = (q as usize).pow(r as u32);
        let mut table = SyndromeTable {
            q,
            r,
            h,
            col,
            dist: vec![UNSEEN; size],
            parent: vec![0; size],
            step: vec![(0, 0); size],
        };
        table.bfs(n);
        table
    }

    fn add(&self, a: usize, b: usize) -> usize {
        if self.q == 2 {
            return a ^ b;
        }
        let f = Fp(self.q);
        let (da, db) = (digits(a, self.q, self.r), digits(b, self.q, self.r));
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| f.add(*x, *y)).collect();
        from_digits(&sum, self.q)
    }

    /// Breadth-first search from the zero syndrome: the first pattern to
    /// reach a syndrome has minimum weight.
    fn bfs(&mut self, n: usize) {
        let mut queue = VecDeque::new();
        self.dist[0] = 0;
        queue.push_back(0usize);
        while let Some(s) = queue.pop_front() {
            let d = self.dist[s];
            for j in 0..n {
                for a in 1..self.q {
                    let t = self.add(s, self.col[j][a as usize]);
                    if self.dist[t] == UNSEEN {
                        self.dist[t] = d + 1;
                        self.parent[t] = s as u32;
                        self.step[t] = (j as u8, a as u8);
                        queue.push_back(t);
                    }
                }
            }
        }
    }

    pub fn syndrome(&self, v: &[Symbol]) -> usize {
        let f = Fp(self.q);
        let d: Vec<u32> = self
            .h
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(0, |acc, (h, x)| f.add(acc, f.mul(*h, *x)))
            })
            .collect();
        from_digits(&d, self.q)
    }

    /// Minimum-weight error pattern with syndrome `s`, as `(position, value)`.
    pub fn leader(&self, mut s: usize) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        while s != 0 {
            let (j, a) = self.step[s];
            out.push((j as usize, a as u32));
            s = self.parent[s] as usize;
        }
        out
    }

    pub fn covering_radius(&self) -> usize {
        self.dist.iter().copied().max().unwrap_or(0) as usize
    }

    /// Minimum distance: `1 + min_{j, a != 0} w_{<j}(-a h_j)` where
    /// `w_{<j}` is the lowest weight reaching a syndrome with columns
    /// `0..j` only.
    pub fn min_distance(&self, n: usize) -> usize {
        let size = self.dist.len();
        let mut cur = vec![UNSEEN; size];
        cur[0] = 0;
        let mut best = usize::MAX;
        for j in 0..n {
            for a in 1..self.q {
                let target = self.col[j][(self.q - a) as usize];
                if cur[target] != UNSEEN {
                    best = best.min(1 + cur[target] as usize);
                }
            }
            if best == 1 {
                break;
            }
            let mut next = cur.clone();
            for s in 0..size {
                if cur[s] == UNSEEN {
                    continue;
                }
                for a in 1..self.q {
                    let t = self.add(s, self.col[j][a as usize]);
                    next[t] = next[t].min(cur[s] + 1);
                }
            }
            cur = next;
        }
        best
    }
}
