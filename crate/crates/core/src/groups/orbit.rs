use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::residue::{ResidueRing, RingElem};

use super::matrix::ResidueMatrix;

/// Union-find over `0..len` with path halving and union by size.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
    sets: usize,
}

impl DisjointSets {
    pub fn new(len: usize) -> Self {
        assert!(len <= u32::MAX as usize);
        DisjointSets { parent: (0..len as u32).collect(), size: vec![1; len], sets: len }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Returns whether two distinct sets were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        self.sets -= 1;
        true
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }
}

/// Orbits of the group generated by `generators` on `0..len`, where
/// `act(g, x)` is the index of `g . x`. Images are computed in parallel; the
/// union pass is sequential, so the count does not depend on thread count.
pub fn orbit_count<F>(len: u128, generators: usize, guard: u64, act: F) -> Result<usize>
where
    F: Fn(usize, usize) -> usize + Sync,
{
    if len > guard as u128 {
        return Err(Error::Infeasible { what: "orbit space".into(), size: len, guard: guard as u128 });
    }
    let len = len as usize;
    let mut sets = DisjointSets::new(len);
    for g in 0..generators {
        let images: Vec<usize> = (0..len).into_par_iter().map(|x| act(g, x)).collect();
        for (x, y) in images.into_iter().enumerate() {
            sets.union(x, y);
        }
    }
    Ok(sets.set_count())
}

/// Orbits of multiplication by `scalars` on the ring.
pub fn scalar_orbits(ring: &ResidueRing, scalars: &[RingElem], guard: u64) -> Result<usize> {
    let size = ring.size();
    orbit_count(size, scalars.len(), guard, |g, x| ring.index_of(&ring.mul(&scalars[g], &ring.element(x))))
}

/// Orbits of `x -> g x` on all matrices of the generators' size and ring.
pub fn left_multiplication_orbits(generators: &[ResidueMatrix], guard: u64) -> Result<usize> {
    let Some(first) = generators.first() else {
        return Err(Error::invalid("need at least one generator"));
    };
    let (s, ring) = (first.size(), first.ring());
    let len = matrix_space_size(s, ring.modulus());
    orbit_count(len, generators.len(), guard, |g, x| {
        generators[g].mul(&ResidueMatrix::from_index(s, ring, x as u128)).index() as usize
    })
}

/// Orbits of `x -> g x g^-1` on all matrices; generators must be invertible.
pub fn conjugation_orbits(generators: &[ResidueMatrix], guard: u64) -> Result<usize> {
    let Some(first) = generators.first() else {
        return Err(Error::invalid("need at least one generator"));
    };
    let (s, ring) = (first.size(), first.ring());
    let inverses: Vec<ResidueMatrix> = generators
        .iter()
        .map(|g| g.inverse().ok_or_else(|| Error::invalid(format!("{g} is not invertible"))))
        .collect::<Result<_>>()?;
    let len = matrix_space_size(s, ring.modulus());
    orbit_count(len, generators.len(), guard, |g, x| {
        let m = ResidueMatrix::from_index(s, ring, x as u128);
        generators[g].mul(&m).mul(&inverses[g]).index() as usize
    })
}

pub(crate) fn matrix_space_size(size: usize, modulus: u64) -> u128 {
    (modulus as u128).checked_pow((size * size) as u32).unwrap_or(u128::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::DEFAULT_GUARD;
    use crate::residue::{ExtensionKind, ExtensionModel, PrimePower};

    #[test]
    fn trivial_group() {
        assert_eq!(orbit_count(17, 0, DEFAULT_GUARD, |_, x| x).unwrap(), 17);
        assert_eq!(orbit_count(17, 1, DEFAULT_GUARD, |_, x| x).unwrap(), 17);
    }

    #[test]
    fn sign_action() {
        let r = ResidueRing::base(3, 1);
        let pm = [r.from_int(-1)];
        assert_eq!(scalar_orbits(&r, &pm, DEFAULT_GUARD).unwrap(), 2);
    }

    #[test]
    fn norm_one_on_f9() {
        let l = ExtensionModel::new(3, ExtensionKind::UnramifiedQuadratic).unwrap();
        let h = l.norm_one_subgroup(1).unwrap();
        assert_eq!(scalar_orbits(&l.quotient(1), &h, DEFAULT_GUARD).unwrap(), 3);
    }

    #[test]
    fn similarity_classes() {
        // M_2(F_q) has q^2 + q similarity classes.
        for p in [2u64, 3] {
            let r = PrimePower::new(p, 1).unwrap();
            let gens = [
                ResidueMatrix::new(2, r, &[1, 1, 0, 1]).unwrap(),
                ResidueMatrix::new(2, r, &[0, 1, 1, 0]).unwrap(),
                ResidueMatrix::new(2, r, &[p as i64 - 1, 0, 0, 1]).unwrap(),
            ];
            assert_eq!(conjugation_orbits(&gens, DEFAULT_GUARD).unwrap() as u64, p * p + p);
        }
    }

    #[test]
    fn guard_refuses() {
        let err = orbit_count(1 << 20, 1, 1 << 10, |_, x| x).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
    }
}
