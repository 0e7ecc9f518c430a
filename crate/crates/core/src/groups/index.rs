//! Closed-form orders and indices.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::constraint::{Composition, ValuationConstraint};
use super::matrix::check_size;
use crate::arith::{big_pow, one_plus_over, rat_from_uint, rat_pow_u};
use crate::error::{Error, Result};
use crate::residue::PrimePower;

/// `|GL_m(Z/p^n)| = p^{(n-1) m^2} prod_{i<m} (p^m - p^i)`.
pub fn gl_order(m: usize, pp: PrimePower) -> BigUint {
    let p = pp.p();
    let mut acc = big_pow(p, (pp.n() - 1) * (m * m) as u32);
    for i in 0..m as u32 {
        acc *= big_pow(p, m as u32) - big_pow(p, i);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceIndex {
    /// `[GL_m(Z_p) : K(p^n)]`.
    pub index: BigUint,
    /// `(1 - 1/q) q^{n m^2}`.
    pub majorant: BigRational,
}

impl CongruenceIndex {
    pub fn within_majorant(&self) -> bool {
        rat_from_uint(&self.index) <= self.majorant
    }
}

pub fn congruence_index(m: usize, pp: PrimePower) -> CongruenceIndex {
    let majorant = one_plus_over(pp.p(), -1, 1) * rat_pow_u(pp.p(), pp.n() * (m * m) as u32);
    CongruenceIndex { index: gl_order(m, pp), majorant }
}

/// `[n choose k]_q`.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= big_pow(q, n - i) - 1u32;
        den *= big_pow(q, i + 1) - 1u32;
    }
    num / den
}

/// Number of `F_q`-points of the partial flag variety of the given type.
pub fn gaussian_multinomial(parts: &[usize], q: u64) -> BigUint {
    let mut remaining: u32 = parts.iter().sum::<usize>() as u32;
    let mut acc = BigUint::one();
    for &d in parts {
        acc *= gaussian_binomial(remaining, d as u32, q);
        remaining -= d as u32;
    }
    acc
}

/// `[GL_m(Z/p^n) : P(Z/p^n)] = p^{(n-1) dim G/P} [m; d_1, ..., d_k]_p`.
pub fn parabolic_index(m: usize, comp: &Composition, pp: PrimePower) -> Result<BigUint> {
    check_size(m)?;
    if comp.total() != m {
        return Err(Error::invalid(format!("composition {:?} does not sum to {m}", comp.parts())));
    }
    Ok(big_pow(pp.p(), (pp.n() - 1) * comp.flag_dimension()) * gaussian_multinomial(comp.parts(), pp.p()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Cell {
    Free,
    Zero,
    One,
}

fn cells(cons: &ValuationConstraint, n: u32) -> Vec<Cell> {
    let s = cons.size();
    (0..s * s)
        .map(|idx| {
            let (a, b) = (idx / s, idx % s);
            match (cons.get(a, b).min(n), a == b && cons.unit_diagonal()) {
                (0, _) => Cell::Free,
                (_, true) => Cell::One,
                (_, false) => Cell::Zero,
            }
        })
        .collect()
}

type PatternKey = (u64, usize, Vec<Cell>);

fn pattern_cache() -> &'static RwLock<HashMap<PatternKey, u128>> {
    static CACHE: OnceLock<RwLock<HashMap<PatternKey, u128>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Invertible matrices over `F_p` whose cells follow the pattern. The first
/// `m - 1` rows are enumerated; the last row is counted against the
/// hyperplane they span.
fn pattern_count(p: u64, size: usize, pattern: &[Cell], guard: u64) -> Result<u128> {
    let head = &pattern[..(size - 1) * size];
    let last = &pattern[(size - 1) * size..];
    let free: Vec<usize> = (0..head.len()).filter(|&i| head[i] == Cell::Free).collect();
    let space = (p as u128).checked_pow(free.len() as u32).unwrap_or(u128::MAX);
    if space > guard as u128 {
        return Err(Error::Infeasible { what: format!("mod-{p} pattern enumeration"), size: space, guard: guard as u128 });
    }
    let key = (p, size, pattern.to_vec());
    if let Some(&hit) = pattern_cache().read().expect("pattern cache poisoned").get(&key) {
        return Ok(hit);
    }
    let last_free = last.iter().filter(|&&c| c == Cell::Free).count() as u32;
    let count: u128 = (0..space as u64)
        .into_par_iter()
        .map(|mut code| {
            let mut rows = [[0u64; 4]; 4];
            for (i, cell) in head.iter().enumerate() {
                rows[i / size][i % size] = u64::from(*cell == Cell::One);
            }
            for &i in &free {
                rows[i / size][i % size] = code % p;
                code /= p;
            }
            let Some(normal) = hyperplane_normal(&rows[..size - 1], size, p) else {
                return 0u128;
            };
            let mut fixed = 0u64;
            let mut touches_free = false;
            for (j, cell) in last.iter().enumerate() {
                match cell {
                    Cell::Free => touches_free |= normal[j] != 0,
                    Cell::One => fixed = (fixed + normal[j]) % p,
                    Cell::Zero => {}
                }
            }
            let total = (p as u128).pow(last_free);
            if touches_free {
                total - total / p as u128
            } else if fixed != 0 {
                total
            } else {
                0
            }
        })
        .sum();
    pattern_cache().write().expect("pattern cache poisoned").insert(key, count);
    Ok(count)
}

/// Normal vector of the span of `rows` (`size - 1` vectors in `F_p^size`),
/// or `None` if they are dependent.
fn hyperplane_normal(rows: &[[u64; 4]], size: usize, p: u64) -> Option<[u64; 4]> {
    let mut a: Vec<[u64; 4]> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..size {
        let Some(sel) = (r..a.len()).find(|&i| a[i][col] % p != 0) else {
            continue;
        };
        a.swap(r, sel);
        let inv = crate::arith::inv_mod(a[r][col], p).expect("nonzero mod p");
        for j in 0..size {
            a[r][j] = a[r][j] * inv % p;
        }
        for i in 0..a.len() {
            if i != r && a[i][col] != 0 {
                let f = a[i][col];
                for j in 0..size {
                    a[i][j] = (a[i][j] + (p - f) * a[r][j]) % p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if pivots.len() + 1 != size {
        return None;
    }
    let free_col = (0..size).find(|c| !pivots.contains(c)).expect("one non-pivot column");
    let mut normal = [0u64; 4];
    normal[free_col] = 1;
    for (i, &c) in pivots.iter().enumerate() {
        normal[c] = (p - a[i][free_col]) % p;
    }
    Some(normal)
}

/// Invertible matrices over `Z/p^n` meeting the constraint: the mod-p pattern
/// count times the number of lifts of each cell.
pub fn constrained_subgroup_order(cons: &ValuationConstraint, pp: PrimePower, guard: u64) -> Result<BigUint> {
    let n = pp.n();
    let size = cons.size();
    let base = if size == 1 {
        match cells(cons, n)[0] {
            Cell::Free => (pp.p() - 1) as u128,
            Cell::One => 1,
            Cell::Zero => 0,
        }
    } else {
        pattern_count(pp.p(), size, &cells(cons, n), guard)?
    };
    let lift_exp: u32 = cons.grid().iter().map(|&c| n - c.min(n).max(1)).sum();
    Ok(BigUint::from(base) * big_pow(pp.p(), lift_exp))
}

/// `|K_c \ GL_m(Z_p) / K(p^n)|`, as left cosets of the image mod `p^n`.
pub fn double_coset_count(cons: &ValuationConstraint, pp: PrimePower, guard: u64) -> Result<BigUint> {
    let order = constrained_subgroup_order(cons, pp, guard)?;
    if order.is_zero() {
        return Err(Error::invalid(format!("constraint {cons} admits no invertible matrix")));
    }
    let (q, r) = gl_order(cons.size(), pp).div_rem(&order);
    if !r.is_zero() {
        return Err(Error::invalid(format!("constraint {cons} does not describe a subgroup")));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::DEFAULT_GUARD;

    fn pp(p: u64, n: u32) -> PrimePower {
        PrimePower::new(p, n).unwrap()
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(2, pp(2, 1)), BigUint::from(6u32));
        assert_eq!(gl_order(3, pp(2, 1)), BigUint::from(168u32));
        assert_eq!(gl_order(3, pp(2, 2)), BigUint::from(86016u32));
    }

    #[test]
    fn congruence_examples() {
        let c = congruence_index(2, pp(2, 1));
        assert_eq!(c.index, BigUint::from(6u32));
        assert_eq!(c.majorant, BigRational::from_integer(8.into()));
        let c = congruence_index(1, pp(3, 2));
        assert_eq!(rat_from_uint(&c.index), c.majorant);
        let c = congruence_index(2, pp(3, 1));
        assert_eq!(c.index, BigUint::from(48u32));
        assert!(c.within_majorant());
    }

    #[test]
    fn parabolic_examples() {
        let b3 = Composition::borel(3);
        assert_eq!(parabolic_index(3, &b3, pp(2, 1)).unwrap(), BigUint::from(21u32));
        let p21 = Composition::new(vec![2, 1]).unwrap();
        assert_eq!(parabolic_index(3, &p21, pp(2, 1)).unwrap(), BigUint::from(7u32));
        assert_eq!(parabolic_index(2, &Composition::borel(2), pp(2, 1)).unwrap(), BigUint::from(3u32));
        assert!(parabolic_index(2, &b3, pp(2, 1)).is_err());
    }

    #[test]
    fn constrained_examples() {
        let free = ValuationConstraint::unconstrained(3).unwrap();
        assert_eq!(constrained_subgroup_order(&free, pp(2, 1), DEFAULT_GUARD).unwrap(), BigUint::from(168u32));
        let k = ValuationConstraint::new(3, vec![0, 0, 0, 1, 0, 0, 1, 0, 0]).unwrap();
        assert_eq!(constrained_subgroup_order(&k, pp(2, 1), DEFAULT_GUARD).unwrap(), BigUint::from(24u32));
        assert_eq!(double_coset_count(&k, pp(2, 1), DEFAULT_GUARD).unwrap(), BigUint::from(7u32));
        let kn = ValuationConstraint::principal(3, 2).unwrap();
        assert_eq!(constrained_subgroup_order(&kn, pp(3, 2), DEFAULT_GUARD).unwrap(), BigUint::one());
        let unit = ValuationConstraint::unconstrained(1).unwrap();
        assert_eq!(constrained_subgroup_order(&unit, pp(3, 2), DEFAULT_GUARD).unwrap(), BigUint::from(6u32));
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_binomial(3, 1, 2), BigUint::from(7u32));
        assert_eq!(gaussian_binomial(4, 2, 3), BigUint::from(130u32));
        assert_eq!(gaussian_multinomial(&[1, 1, 1], 5), BigUint::from(186u32));
    }

    #[test]
    fn guard_applies_to_patterns() {
        let free = ValuationConstraint::unconstrained(3).unwrap();
        let err = constrained_subgroup_order(&free, pp(7, 1), 1000).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
    }
}
