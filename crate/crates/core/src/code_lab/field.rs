use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn is_prime(q: u32) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of the prime field `F_q`, `q < 2^16`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn new(value: u32, modulus: u32) -> Result<Self> {
        if modulus >= 1 << 16 || !is_prime(modulus) {
            return Err(Error::InvalidCode(format!("{modulus} is not a prime below 2^16")));
        }
        Ok(FieldElement {
            value: value % modulus,
            modulus,
        })
    }

    pub fn zero(modulus: u32) -> Result<Self> {
        Self::new(0, modulus)
    }

    pub fn one(modulus: u32) -> Result<Self> {
        Self::new(1, modulus)
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = FieldElement {
            value: 1 % self.modulus,
            modulus: self.modulus,
        };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.modulus as u64 - 2))
        }
    }

    fn same_field(self, other: Self) {
        assert_eq!(self.modulus, other.modulus, "mixing elements of different fields");
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.same_field(rhs);
        FieldElement {
            value: (self.value + rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        FieldElement {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.same_field(rhs);
        FieldElement {
            value: (self.value * rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

/// Raw arithmetic mod a small prime, used by the matrix routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Fp(pub u32);

impl Fp {
    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.0 - b) % self.0
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.0
    }

    pub fn neg(self, a: u32) -> u32 {
        (self.0 - a) % self.0
    }

    pub fn inv(self, a: u32) -> u32 {
        let mut acc = 1u32;
        let mut base = a % self.0;
        let mut e = self.0 - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Reduces `m` in place to reduced row echelon form, pivoting only within
/// the first `pivot_cols` columns. Returns the pivot column of each
/// nonzero row, in row order.
pub(crate) fn row_reduce(m: &mut [Vec<u32>], pivot_cols: usize, f: Fp) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..pivot_cols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, p);
        let inv = f.inv(m[row][col]);
        for v in m[row].iter_mut() {
            *v = f.mul(*v, inv);
        }
        for r in 0..m.len() {
            if r != row && m[r][col] != 0 {
                let factor = m[r][col];
                for c in 0..m[r].len() {
                    let t = f.mul(factor, m[row][c]);
                    m[r][c] = f.sub(m[r][c], t);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}
