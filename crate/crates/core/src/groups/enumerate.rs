//! Brute-force oracles for the closed forms in [`super::index`].

use std::collections::{BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;

use super::constraint::{Composition, ValuationConstraint};
use super::matrix::{check_size, ResidueMatrix};
use super::orbit::{matrix_space_size, DisjointSets};
use crate::error::{Error, Result};
use crate::residue::PrimePower;

fn check_guard(what: &str, size: u128, guard: u64) -> Result<()> {
    if size > guard as u128 {
        return Err(Error::Infeasible { what: what.into(), size, guard: guard as u128 });
    }
    Ok(())
}

/// Counts matrices in `M_m(Z/p^n)` satisfying `pred`, visiting every one.
fn count_all<F>(m: usize, pp: PrimePower, guard: u64, pred: F) -> Result<u128>
where
    F: Fn(&ResidueMatrix) -> bool + Sync,
{
    check_size(m)?;
    let len = matrix_space_size(m, pp.modulus());
    check_guard("matrix enumeration", len, guard)?;
    Ok((0..len as u64)
        .into_par_iter()
        .filter(|&i| pred(&ResidueMatrix::from_index(m, pp, i as u128)))
        .count() as u128)
}

pub fn count_invertible(m: usize, pp: PrimePower, guard: u64) -> Result<u128> {
    count_all(m, pp, guard, ResidueMatrix::is_invertible)
}

/// Full enumeration of `M_m(Z/p^n)` filtered by the constraint.
pub fn count_constrained(cons: &ValuationConstraint, pp: PrimePower, guard: u64) -> Result<u128> {
    count_all(cons.size(), pp, guard, |g| cons.contains(g))
}

/// Members of the constrained set, visiting only entries that meet the grid.
pub fn constrained_elements(cons: &ValuationConstraint, pp: PrimePower, guard: u64) -> Result<Vec<ResidueMatrix>> {
    let s = cons.size();
    let n = pp.n();
    let p = pp.p();
    // each cell ranges over offset + step * t, t < count
    let cells: Vec<(u64, u64, u64)> = (0..s * s)
        .map(|idx| {
            let c = cons.get(idx / s, idx % s).min(n);
            let offset = u64::from(cons.unit_diagonal() && idx / s == idx % s && c > 0);
            (offset, p.pow(c), p.pow(n - c))
        })
        .collect();
    let len: u128 = cells.iter().map(|&(_, _, k)| k as u128).product();
    check_guard("constrained enumeration", len, guard)?;
    let modulus = pp.modulus();
    let mut out: Vec<ResidueMatrix> = (0..len as u64)
        .into_par_iter()
        .filter_map(|mut code| {
            let entries = cells
                .iter()
                .map(|&(offset, step, count)| {
                    let t = code % count;
                    code /= count;
                    (offset + step * t) % modulus
                })
                .collect();
            let g = ResidueMatrix::from_reduced(s, pp, entries);
            g.is_invertible().then_some(g)
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Greedy generating set: keeps an element only if it lies outside the
/// subgroup generated by those already kept.
pub fn generating_set(elements: &[ResidueMatrix]) -> Vec<ResidueMatrix> {
    let mut gens: Vec<ResidueMatrix> = Vec::new();
    let mut closure: HashSet<u128> = HashSet::new();
    for g in elements {
        if closure.contains(&g.index()) {
            continue;
        }
        gens.push(g.clone());
        closure = generated_subgroup(&gens);
    }
    gens
}

fn generated_subgroup(gens: &[ResidueMatrix]) -> HashSet<u128> {
    let id = ResidueMatrix::identity(gens[0].size(), gens[0].ring()).expect("valid size");
    let mut seen = HashSet::from([id.index()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.mul(&x);
            if seen.insert(y.index()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// `|H \ GL_m(Z/p^n)|` for `H` the constrained set, by union-find on left
/// multiplication over the whole matrix space.
pub fn coset_count(cons: &ValuationConstraint, pp: PrimePower, guard: u64) -> Result<usize> {
    let s = cons.size();
    let len = matrix_space_size(s, pp.modulus());
    check_guard("coset enumeration", len, guard)?;
    let subgroup = constrained_elements(cons, pp, guard)?;
    if subgroup.is_empty() {
        return Err(Error::invalid(format!("constraint {cons} admits no invertible matrix")));
    }
    let gens = generating_set(&subgroup);
    let len = len as usize;
    let mut sets = DisjointSets::new(len);
    for h in &gens {
        let images: Vec<usize> =
            (0..len).into_par_iter().map(|x| h.mul(&ResidueMatrix::from_index(s, pp, x as u128)).index() as usize).collect();
        for (x, y) in images.into_iter().enumerate() {
            sets.union(x, y);
        }
    }
    let roots: HashSet<usize> = (0..len)
        .filter(|&x| ResidueMatrix::from_index(s, pp, x as u128).is_invertible())
        .map(|x| sets.find(x))
        .collect();
    Ok(roots.len())
}

/// Partial flags of the given type in `F_p^m`, by listing every subspace as a
/// bitmask over the `p^m` vectors.
pub fn flag_count(comp: &Composition, p: u64) -> Result<u128> {
    let m = comp.total();
    check_size(m)?;
    let points = p.checked_pow(m as u32).filter(|&v| v <= 128).ok_or_else(|| {
        Error::invalid(format!("F_{p}^{m} has more than 128 points"))
    })? as usize;
    let add = |x: usize, y: usize, c: u64| -> usize {
        let (mut x, mut y, mut out, mut place) = (x as u64, y as u64, 0u64, 1u64);
        for _ in 0..m {
            out += ((x % p + c * (y % p)) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        out as usize
    };
    let mut by_dim: Vec<BTreeSet<u128>> = vec![BTreeSet::new(); m + 1];
    by_dim[0].insert(1);
    for d in 0..m {
        let current: Vec<u128> = by_dim[d].iter().copied().collect();
        for space in current {
            for v in 0..points {
                if space >> v & 1 == 1 {
                    continue;
                }
                let mut bigger = 0u128;
                for s in (0..points).filter(|&s| space >> s & 1 == 1) {
                    for c in 0..p {
                        bigger |= 1 << add(s, v, c);
                    }
                }
                by_dim[d + 1].insert(bigger);
            }
        }
    }
    let mut dims = vec![0usize];
    for &d in comp.parts() {
        dims.push(dims.last().unwrap() + d);
    }
    // chains 0 = V_0 < V_1 < ... with prescribed dimensions
    let mut counts: Vec<(u128, u128)> = vec![(1, 1)];
    for &d in &dims[1..] {
        counts = by_dim[d]
            .iter()
            .map(|&big| {
                let ways = counts.iter().filter(|&&(small, _)| small & !big == 0).map(|&(_, w)| w).sum();
                (big, ways)
            })
            .collect();
    }
    Ok(counts.iter().map(|&(_, w)| w).sum())
}

/// Image mod `p^n` of `{g in GL_m(Z_p) : t g t^-1 in GL_m(Z_p)}` with
/// `t = diag(p^lambda)`, computed by running over `k = t g t^-1` mod
/// `p^{n+L}` and conjugating back.
pub fn cocharacter_image(lambda: &[i64], pp: PrimePower, guard: u64) -> Result<BTreeSet<ResidueMatrix>> {
    let s = lambda.len();
    check_size(s)?;
    let lo = *lambda.iter().min().unwrap();
    let hi = *lambda.iter().max().unwrap();
    let wide = PrimePower::new(pp.p(), pp.n() + (hi - lo) as u32)?;
    let p = pp.p();
    let w = wide.n();
    // k_ab must have valuation >= lambda_a - lambda_b
    let shifts: Vec<i64> = (0..s * s).map(|i| lambda[i / s] - lambda[i % s]).collect();
    let cells: Vec<(u64, u64)> =
        shifts.iter().map(|&d| (p.pow(d.max(0) as u32), p.pow(w - d.max(0) as u32))).collect();
    let len: u128 = cells.iter().map(|&(_, k)| k as u128).product();
    check_guard("cocharacter conjugation", len, guard)?;
    let target = pp.modulus();
    let wide_mod = wide.modulus();
    let found: Vec<ResidueMatrix> = (0..len as u64)
        .into_par_iter()
        .filter_map(|mut code| {
            let k: Vec<u64> = cells
                .iter()
                .map(|&(step, count)| {
                    let t = code % count;
                    code /= count;
                    step * t
                })
                .collect();
            if !ResidueMatrix::from_reduced(s, wide, k.iter().map(|x| x % wide_mod).collect()).is_invertible() {
                return None;
            }
            let g = k
                .iter()
                .zip(&shifts)
                .map(|(&x, &d)| {
                    let v = if d >= 0 { x / p.pow(d as u32) } else { x * p.pow((-d) as u32) };
                    v % target
                })
                .collect();
            Some(ResidueMatrix::from_reduced(s, pp, g))
        })
        .collect();
    Ok(found.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::DEFAULT_GUARD;

    fn pp(p: u64, n: u32) -> PrimePower {
        PrimePower::new(p, n).unwrap()
    }

    #[test]
    fn small_orders() {
        assert_eq!(count_invertible(2, pp(2, 1), DEFAULT_GUARD).unwrap(), 6);
        assert_eq!(count_invertible(3, pp(2, 1), DEFAULT_GUARD).unwrap(), 168);
    }

    #[test]
    fn flags() {
        assert_eq!(flag_count(&Composition::borel(3), 2).unwrap(), 21);
        assert_eq!(flag_count(&Composition::new(vec![2, 1]).unwrap(), 2).unwrap(), 7);
        assert_eq!(flag_count(&Composition::borel(2), 2).unwrap(), 3);
        assert_eq!(flag_count(&Composition::borel(3), 3).unwrap(), 13 * 4);
    }

    #[test]
    fn cosets_of_parabolic_pattern() {
        let k = ValuationConstraint::new(3, vec![0, 0, 0, 1, 0, 0, 1, 0, 0]).unwrap();
        assert_eq!(constrained_elements(&k, pp(2, 1), DEFAULT_GUARD).unwrap().len(), 24);
        assert_eq!(coset_count(&k, pp(2, 1), DEFAULT_GUARD).unwrap(), 7);
    }

    #[test]
    fn conjugation_image_matches_grid() {
        let r = pp(2, 1);
        let k = ValuationConstraint::new(3, vec![0, 0, 0, 1, 0, 0, 1, 0, 0]).unwrap();
        let grid: BTreeSet<_> = constrained_elements(&k, r, DEFAULT_GUARD).unwrap().into_iter().collect();
        assert_eq!(cocharacter_image(&[1, 0, 0], r, DEFAULT_GUARD).unwrap(), grid);
    }
}
