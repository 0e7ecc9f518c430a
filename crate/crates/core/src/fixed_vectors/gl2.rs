//! Norm-one orbit counts on residue rings of quadratic extensions, and the
//! supercuspidal fixed-vector bound they assemble into.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Serialize;

use crate::arith::{big_pow, is_prime, one_plus_over, rat_from_uint, rat_pow_u, smallest_nonresidue};
use crate::error::{Error, Result};
use crate::groups::orbit::scalar_orbits;
use crate::residue::{DefiningParameter, ExtensionKind, ExtensionModel, ResidueRing, RingElem};

/// A brute-force orbit count next to its closed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitCheck {
    pub p: u64,
    pub kind: ExtensionKind,
    pub param: DefiningParameter,
    /// Exponent `t` of the quotient `O_L / p_L^t`.
    pub ring_level: u32,
    pub ring_size: u128,
    pub brute_force: u128,
    pub closed_form: u128,
}

impl OrbitCheck {
    pub fn agrees(&self) -> bool {
        self.brute_force == self.closed_form
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::invalid("norm-one orbit counts need p odd"));
    }
    Ok(())
}

/// `q^a`.
pub fn unramified_closed_form(q: u64, a: u32) -> u128 {
    (q as u128).pow(a)
}

/// `(q^n + q^{n-1}) / 2`; `q` odd so the sum is even.
pub fn ramified_closed_form(q: u64, n: u32) -> u128 {
    let q = q as u128;
    (q.pow(n) + q.pow(n - 1)) / 2
}

/// Subset of `elems` generating the same multiplicative group; an element
/// is kept only if it lies outside the closure of those already kept.
fn scalar_generators(ring: &ResidueRing, elems: &[RingElem]) -> Vec<RingElem> {
    let mut gens: Vec<RingElem> = Vec::new();
    let mut closure: HashSet<RingElem> = HashSet::from([ring.one()]);
    for x in elems {
        if closure.contains(x) {
            continue;
        }
        gens.push(*x);
        let mut queue: VecDeque<RingElem> = closure.iter().copied().collect();
        while let Some(y) = queue.pop_front() {
            for g in &gens {
                let z = ring.mul(g, &y);
                if closure.insert(z) {
                    queue.push_back(z);
                }
            }
        }
    }
    gens
}

fn orbit_check(model: ExtensionModel, level: u32, closed_form: u128, guard: u64) -> Result<OrbitCheck> {
    let ring = model.quotient(level);
    let size = ring.size();
    if size > guard as u128 {
        return Err(Error::Infeasible { what: format!("orbits on O_L/p_L^{level}"), size, guard: guard as u128 });
    }
    let image = model.norm_one_subgroup_guarded(level, guard)?;
    let gens = scalar_generators(&ring, &image);
    let brute_force = scalar_orbits(&ring, &gens, guard)? as u128;
    Ok(OrbitCheck {
        p: model.p(),
        kind: model.kind(),
        param: model.param(),
        ring_level: level,
        ring_size: size,
        brute_force,
        closed_form,
    })
}

/// Orbits of `L^1` on `O_L / p_L^a` for `L` the unramified quadratic extension.
pub fn unramified_orbits(p: u64, a: u32, guard: u64) -> Result<OrbitCheck> {
    check_odd_prime(p)?;
    let model = ExtensionModel::new(p, ExtensionKind::UnramifiedQuadratic)?;
    orbit_check(model, a, unramified_closed_form(p, a), guard)
}

/// Orbits of `L^1` on `O_L / p_L^{2n-1}` for both ramified quadratic
/// extensions, `x^2 = p` and `x^2 = eps p`.
pub fn ramified_orbits(p: u64, n: u32, guard: u64) -> Result<[OrbitCheck; 2]> {
    check_odd_prime(p)?;
    if n == 0 {
        return Err(Error::invalid("ramified orbit counts need n >= 1"));
    }
    let closed = ramified_closed_form(p, n);
    let check = |u: u64| {
        let model =
            ExtensionModel::with_param(p, ExtensionKind::RamifiedQuadratic, DefiningParameter::UnitMultiplier(u))?;
        orbit_check(model, 2 * n - 1, closed, guard)
    };
    Ok([check(1)?, check(smallest_nonresidue(p))?])
}

/// Level of the quotient whose orbits bound one unramified component:
/// `c - 2 ceil((c - n)/2)`, which is `n` or `n - 1` by the parity of `c - n`.
pub fn lemma_level(c: i64, n: u32) -> u32 {
    let shift = (c - n as i64).div_euclid(2) + (c - n as i64).rem_euclid(2);
    (c - 2 * shift) as u32
}

/// Proposition-level bound `q^n (1 + 1/q)` with the per-case components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupercuspidalBound {
    pub p: u64,
    pub n: u32,
    pub bound: BigRational,
    /// `q^a` for the two additive characters, whose conductors differ in parity.
    pub unramified: [BigUint; 2],
    /// `(q^n + q^{n-1})/2` for each of the two components.
    pub ramified: [BigUint; 2],
}

impl SupercuspidalBound {
    pub fn unramified_sum(&self) -> BigUint {
        &self.unramified[0] + &self.unramified[1]
    }

    pub fn ramified_sum(&self) -> BigUint {
        &self.ramified[0] + &self.ramified[1]
    }

    pub fn components_within(&self) -> bool {
        rat_from_uint(&self.unramified_sum()) <= self.bound && rat_from_uint(&self.ramified_sum()) <= self.bound
    }
}

pub fn supercuspidal_bound(p: u64, n: u32) -> Result<SupercuspidalBound> {
    check_odd_prime(p)?;
    if n == 0 {
        return Err(Error::invalid("supercuspidal bound needs n >= 1"));
    }
    let bound = rat_pow_u(p, n) * one_plus_over(p, 1, 1);
    // any conductor c works; c and c + 1 give the two parities
    let c = n as i64;
    let unramified = [big_pow(p, lemma_level(c, n)), big_pow(p, lemma_level(c + 1, n))];
    let half = (big_pow(p, n) + big_pow(p, n - 1)) / 2u32;
    Ok(SupercuspidalBound { p, n, bound, unramified, ramified: [half.clone(), half] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::DEFAULT_GUARD;

    #[test]
    fn unramified_examples() {
        for (p, a, want) in [(3, 1, 3), (3, 0, 1), (5, 2, 25)] {
            let c = unramified_orbits(p, a, DEFAULT_GUARD).unwrap();
            assert_eq!(c.brute_force, want);
            assert!(c.agrees());
        }
    }

    #[test]
    fn ramified_examples() {
        for (p, n, want) in [(3, 1, 2), (3, 2, 6), (7, 1, 4)] {
            for c in ramified_orbits(p, n, DEFAULT_GUARD).unwrap() {
                assert_eq!(c.brute_force, want, "{c:?}");
                assert!(c.agrees());
            }
        }
    }

    #[test]
    fn levels_alternate() {
        for n in 1..6u32 {
            for c in -3..12i64 {
                let a = lemma_level(c, n);
                let want = if (c - n as i64).rem_euclid(2) == 0 { n } else { n - 1 };
                assert_eq!(a, want, "c={c} n={n}");
            }
        }
    }

    #[test]
    fn bound_examples() {
        let b = supercuspidal_bound(3, 1).unwrap();
        assert_eq!(b.bound, BigRational::from_integer(4.into()));
        assert_eq!(b.unramified, [BigUint::from(3u32), BigUint::from(1u32)]);
        let b = supercuspidal_bound(3, 2).unwrap();
        assert_eq!(b.ramified_sum(), BigUint::from(12u32));
        assert!(b.components_within());
        assert_eq!(supercuspidal_bound(5, 1).unwrap().bound, BigRational::from_integer(6.into()));
        assert!(supercuspidal_bound(2, 1).is_err());
    }

    #[test]
    fn guard_refuses_large_rings() {
        let err = unramified_orbits(7, 3, 1000).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
    }
}
