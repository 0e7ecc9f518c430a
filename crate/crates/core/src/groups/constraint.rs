use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::matrix::{check_size, ResidueMatrix};
use crate::error::{Error, Result};

/// Entry-wise minimum valuations `v(g_ab) >= c_ab`.
///
/// With `unit_diagonal` set, the diagonal condition reads `v(g_aa - 1) >= c_aa`;
/// otherwise diagonal entries must be 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValuationConstraint {
    size: usize,
    grid: Vec<u32>,
    unit_diagonal: bool,
}

impl ValuationConstraint {
    pub fn new(size: usize, grid: Vec<u32>) -> Result<Self> {
        check_size(size)?;
        if grid.len() != size * size {
            return Err(Error::invalid("constraint grid has the wrong length"));
        }
        if (0..size).any(|a| grid[a * size + a] != 0) {
            return Err(Error::invalid("diagonal entries must be 0 unless unit_diagonal is set"));
        }
        Ok(ValuationConstraint { size, grid, unit_diagonal: false })
    }

    pub fn with_unit_diagonal(size: usize, grid: Vec<u32>) -> Result<Self> {
        check_size(size)?;
        if grid.len() != size * size {
            return Err(Error::invalid("constraint grid has the wrong length"));
        }
        Ok(ValuationConstraint { size, grid, unit_diagonal: true })
    }

    pub fn unconstrained(size: usize) -> Result<Self> {
        Self::new(size, vec![0; size * size])
    }

    /// `K_n`: matrices congruent to the identity mod `p^n`.
    pub fn principal(size: usize, n: u32) -> Result<Self> {
        Self::with_unit_diagonal(size, vec![n; size * size])
    }

    /// Block upper-triangular parabolic for the composition: entries below the
    /// diagonal blocks vanish mod `p^n`.
    pub fn parabolic(comp: &Composition, n: u32) -> Result<Self> {
        let size = comp.total();
        let block = comp.block_of();
        let mut grid = vec![0; size * size];
        for a in 0..size {
            for b in 0..size {
                if block[a] > block[b] {
                    grid[a * size + b] = n;
                }
            }
        }
        Self::new(size, grid)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn unit_diagonal(&self) -> bool {
        self.unit_diagonal
    }

    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.grid[a * self.size + b]
    }

    pub fn grid(&self) -> &[u32] {
        &self.grid
    }

    pub fn capped(&self, n: u32) -> Self {
        ValuationConstraint {
            size: self.size,
            grid: self.grid.iter().map(|&c| c.min(n)).collect(),
            unit_diagonal: self.unit_diagonal,
        }
    }

    /// `c_ab + c_bc >= c_ac` whenever `b` differs from `a` and `c`; sufficient
    /// for the set to be closed under multiplication.
    pub fn is_closed(&self) -> bool {
        let s = self.size;
        (0..s).all(|a| {
            (0..s).all(|c| {
                (0..s)
                    .filter(|&b| b != a && b != c)
                    .all(|b| self.get(a, b) + self.get(b, c) >= self.get(a, c))
            })
        })
    }

    /// Entry conditions only; invertibility is checked separately.
    pub fn admits(&self, g: &ResidueMatrix) -> bool {
        let ring = g.ring();
        let modulus = ring.modulus();
        (0..self.size).all(|a| {
            (0..self.size).all(|b| {
                let c = self.get(a, b).min(ring.n());
                let x = if a == b && self.unit_diagonal { (g.get(a, b) + modulus - 1) % modulus } else { g.get(a, b) };
                x % ring.p().pow(c) == 0
            })
        })
    }

    pub fn contains(&self, g: &ResidueMatrix) -> bool {
        self.admits(g) && g.is_invertible()
    }

    /// Stable short digest of the grid for cache keys.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update([self.size as u8, self.unit_diagonal as u8]);
        for c in &self.grid {
            h.update(c.to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

impl fmt::Display for ValuationConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .grid
            .chunks(self.size)
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]{}", rows.join("; "), if self.unit_diagonal { " (unit diagonal)" } else { "" })
    }
}

/// Ordered block sizes of a standard parabolic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::invalid("composition parts must be positive"));
        }
        Ok(Composition { parts })
    }

    pub fn borel(m: usize) -> Self {
        Composition { parts: vec![1; m] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `dim G/P = (m^2 - sum d_i^2) / 2`.
    pub fn flag_dimension(&self) -> u32 {
        let m = self.total();
        ((m * m - self.parts.iter().map(|d| d * d).sum::<usize>()) / 2) as u32
    }

    fn block_of(&self) -> Vec<usize> {
        self.parts.iter().enumerate().flat_map(|(i, &d)| std::iter::repeat_n(i, d)).collect()
    }
}
