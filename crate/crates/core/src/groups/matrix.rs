use std::fmt;

use crate::arith::{inv_mod, mul_mod, vp};
use crate::error::{Error, Result};
use crate::residue::{PrimePower, Valuation};

/// Largest matrix size the library handles.
pub const MAX_SIZE: usize = 4;

/// Square matrix over `Z/p^n`, entries row-major in `[0, p^n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueMatrix {
    size: usize,
    ring: PrimePower,
    entries: Vec<u64>,
}

impl ResidueMatrix {
    pub fn new(size: usize, ring: PrimePower, entries: &[i64]) -> Result<Self> {
        check_size(size)?;
        if entries.len() != size * size {
            return Err(Error::invalid(format!("expected {} entries, got {}", size * size, entries.len())));
        }
        let m = ring.modulus() as i128;
        let entries = entries.iter().map(|&x| (x as i128).rem_euclid(m) as u64).collect();
        Ok(ResidueMatrix { size, ring, entries })
    }

    /// Entries already reduced; used by enumerators.
    pub(crate) fn from_reduced(size: usize, ring: PrimePower, entries: Vec<u64>) -> Self {
        debug_assert!(entries.iter().all(|&x| x < ring.modulus()));
        ResidueMatrix { size, ring, entries }
    }

    pub fn identity(size: usize, ring: PrimePower) -> Result<Self> {
        check_size(size)?;
        let mut entries = vec![0; size * size];
        for i in 0..size {
            entries[i * size + i] = 1 % ring.modulus();
        }
        Ok(ResidueMatrix { size, ring, entries })
    }

    /// `diag(p^l_1, ..., p^l_m)` reduced mod `p^n`.
    pub fn diagonal_powers(ring: PrimePower, exps: &[u32]) -> Result<Self> {
        let size = exps.len();
        let mut m = Self::identity(size, ring)?;
        for (i, &e) in exps.iter().enumerate() {
            m.entries[i * size + i] = ring.p().checked_pow(e).map_or(0, |v| v % ring.modulus());
        }
        Ok(m)
    }

    /// Decodes the mixed-radix index used by the enumerators (row-major,
    /// first entry least significant).
    pub fn from_index(size: usize, ring: PrimePower, mut idx: u128) -> Self {
        let m = ring.modulus() as u128;
        let entries = (0..size * size)
            .map(|_| {
                let d = (idx % m) as u64;
                idx /= m;
                d
            })
            .collect();
        ResidueMatrix { size, ring, entries }
    }

    pub fn index(&self) -> u128 {
        let m = self.ring.modulus() as u128;
        self.entries.iter().rev().fold(0u128, |acc, &d| acc * m + d as u128)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ring(&self) -> PrimePower {
        self.ring
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, a: usize, b: usize) -> u64 {
        self.entries[a * self.size + b]
    }

    pub fn valuation(&self, a: usize, b: usize) -> Valuation {
        match self.get(a, b) {
            0 => Valuation::Infinite,
            x => Valuation::Finite(vp(x, self.ring.p())),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.size, other.size);
        let m = self.ring.modulus();
        let s = self.size;
        let mut entries = vec![0u64; s * s];
        for i in 0..s {
            for k in 0..s {
                let a = self.entries[i * s + k];
                if a == 0 {
                    continue;
                }
                for j in 0..s {
                    entries[i * s + j] = (entries[i * s + j] + mul_mod(a, other.entries[k * s + j], m)) % m;
                }
            }
        }
        ResidueMatrix { size: s, ring: self.ring, entries }
    }

    pub fn det(&self) -> u64 {
        let m = self.ring.modulus() as i128;
        let rows: Vec<usize> = (0..self.size).collect();
        det_minor(&self.entries, self.size, &rows, 0, m).rem_euclid(m) as u64
    }

    /// Invertible iff the determinant is a unit iff the reduction mod p is.
    pub fn is_invertible(&self) -> bool {
        self.det() % self.ring.p() != 0
    }

    pub fn inverse(&self) -> Option<Self> {
        let m = self.ring.modulus();
        let d_inv = inv_mod(self.det(), m)?;
        let s = self.size;
        let mut entries = vec![0u64; s * s];
        for i in 0..s {
            for j in 0..s {
                // adj[i][j] = (-1)^{i+j} minor(j, i)
                let rows: Vec<usize> = (0..s).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..s).filter(|&c| c != i).collect();
                let sub: Vec<u64> = rows.iter().flat_map(|&r| cols.iter().map(move |&c| (r, c))).map(|(r, c)| self.get(r, c)).collect();
                let idx: Vec<usize> = (0..s - 1).collect();
                let mut minor = if s == 1 { 1 } else { det_minor(&sub, s - 1, &idx, 0, m as i128) };
                if (i + j) % 2 == 1 {
                    minor = -minor;
                }
                entries[i * s + j] = mul_mod(minor.rem_euclid(m as i128) as u64, d_inv, m);
            }
        }
        Some(ResidueMatrix { size: s, ring: self.ring, entries })
    }

    /// Reduction to `Z/p^k`, `k <= n`.
    pub fn reduce(&self, k: u32) -> Result<Self> {
        let ring = PrimePower::new(self.ring.p(), k)?;
        if k > self.ring.n() {
            return Err(Error::invalid("cannot reduce to a finer level"));
        }
        let m = ring.modulus();
        Ok(ResidueMatrix { size: self.size, ring, entries: self.entries.iter().map(|x| x % m).collect() })
    }
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .chunks(self.size)
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

pub(crate) fn check_size(size: usize) -> Result<()> {
    if size == 0 || size > MAX_SIZE {
        return Err(Error::invalid(format!("matrix size must be in 1..={MAX_SIZE}, got {size}")));
    }
    Ok(())
}

/// Cofactor expansion along row `start` of the minor on the given columns.
fn det_minor(entries: &[u64], size: usize, cols: &[usize], start: usize, m: i128) -> i128 {
    if cols.len() == 1 {
        return entries[start * size + cols[0]] as i128;
    }
    let mut acc = 0i128;
    for (k, &c) in cols.iter().enumerate() {
        let a = entries[start * size + c] as i128;
        if a == 0 {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = a * det_minor(entries, size, &rest, start + 1, m) % m;
        acc = if k % 2 == 0 { acc + term } else { acc - term } % m;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let r = PrimePower::new(3, 2).unwrap();
        let g = ResidueMatrix::new(3, r, &[1, 2, 0, 3, 1, 1, 0, 4, 2]).unwrap();
        assert!(g.is_invertible());
        let h = g.inverse().unwrap();
        assert_eq!(g.mul(&h), ResidueMatrix::identity(3, r).unwrap());
        let s = ResidueMatrix::new(2, r, &[3, 0, 0, 1]).unwrap();
        assert!(!s.is_invertible());
        assert_eq!(s.valuation(0, 0), Valuation::Finite(1));
        assert_eq!(s.valuation(0, 1), Valuation::Infinite);
    }

    #[test]
    fn index_roundtrip() {
        let r = PrimePower::new(2, 2).unwrap();
        for idx in [0u128, 1, 77, 4u128.pow(9) - 1] {
            assert_eq!(ResidueMatrix::from_index(3, r, idx).index(), idx);
        }
    }

    #[test]
    fn det_matches_permutation_sum() {
        let r = PrimePower::new(5, 1).unwrap();
        let g = ResidueMatrix::new(4, r, &[1, 2, 3, 4, 0, 1, 4, 2, 3, 3, 0, 1, 2, 0, 1, 1]).unwrap();
        let perms = [
            [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
            [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
            [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
            [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
        ];
        let mut sum = 0i64;
        for p in perms {
            let inversions = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let term: i64 = (0..4).map(|i| g.get(i, p[i]) as i64).product();
            sum += if inversions % 2 == 0 { term } else { -term };
        }
        assert_eq!(g.det() as i64, sum.rem_euclid(5));
    }
}
