//! Cohomological representations `pi_{a,b}` of `U(N-1,1)`: Hodge tables,
//! Langlands exponents, decay exponents and the `U(N-1)` branching identities.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::binomial;
use crate::error::{Error, Result};

/// `pi_{a,b}` of `U(n-1,1)` with `a + b <= n - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CohRep {
    n: u32,
    a: u32,
    b: u32,
}

impl CohRep {
    pub fn new(n: u32, a: u32, b: u32) -> Result<Self> {
        if n == 0 || a + b + 1 > n {
            return Err(Error::invalid(format!("pi_({a},{b}) needs a + b <= N - 1 with N = {n}")));
        }
        Ok(CohRep { n, a, b })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn degree(&self) -> u32 {
        self.a + self.b
    }

    /// All `pi_{a,b}` of `U(n-1,1)`, ordered by `(a, b)`.
    pub fn all(n: u32) -> Vec<CohRep> {
        (0..n).flat_map(|a| (0..n - a).map(move |b| CohRep { n, a, b })).collect()
    }
}

impl fmt::Display for CohRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi_({},{})", self.a, self.b)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeTable {
    entries: BTreeMap<(u32, u32), u32>,
}

impl HodgeTable {
    pub fn get(&self, p: u32, q: u32) -> u32 {
        self.entries.get(&(p, q)).copied().unwrap_or(0)
    }

    /// Nonzero entries in `(p, q)` order.
    pub fn support(&self) -> Vec<(u32, u32)> {
        self.entries.keys().copied().collect()
    }
}

/// `h^{a+k, b+k} = 1` for `0 <= k <= N-1-a-b`.
pub fn hodge_table(rep: &CohRep) -> HodgeTable {
    let entries = (0..rep.n - rep.degree()).map(|k| ((rep.a + k, rep.b + k), 1)).collect();
    HodgeTable { entries }
}

/// Representations with a nonzero bidegree in total degree `d`, each with
/// the number of such bidegrees (always 1).
pub fn reps_in_degree(n: u32, d: u32) -> Result<Vec<(CohRep, u32)>> {
    if n == 0 || d > 2 * (n - 1) {
        return Err(Error::invalid(format!("degree {d} outside 0..=2(N-1) for N = {n}")));
    }
    Ok(CohRep::all(n)
        .into_iter()
        .filter_map(|rep| {
            let hits = hodge_table(&rep).support().iter().filter(|(p, q)| p + q == d).count() as u32;
            (hits > 0).then_some((rep, hits))
        })
        .collect())
}

/// Number of `pi_{a,b}` contributing to bidegree `(p, q)`.
pub fn bidegree_multiplicity(n: u32, p: u32, q: u32) -> u32 {
    let lo = (p + q + 1).saturating_sub(n);
    let hi = p.min(q);
    if p >= n || q >= n || lo > hi {
        0
    } else {
        hi - lo + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayExponent {
    Finite(Rational64),
    Infinite,
}

impl fmt::Display for DecayExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecayExponent::Finite(r) => write!(f, "{r}"),
            DecayExponent::Infinite => write!(f, "inf"),
        }
    }
}

/// `p(pi_{a,b}) = 2(N-1)/d`, infinite for `d = 0`.
pub fn decay_exponent(rep: &CohRep) -> DecayExponent {
    match rep.degree() {
        0 => DecayExponent::Infinite,
        d => DecayExponent::Finite(Rational64::new(2 * (rep.n as i64 - 1), d as i64)),
    }
}

/// `2 / p(pi)`, zero when the decay exponent is infinite.
pub fn multiplicity_exponent(rep: &CohRep) -> Rational64 {
    match decay_exponent(rep) {
        DecayExponent::Finite(p) => Rational64::from_integer(2) / p,
        DecayExponent::Infinite => Rational64::zero(),
    }
}

/// `(z / zbar)^{t} |z|^{r}` with `t = twist_doubled / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub twist_doubled: i64,
    pub r: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterExponents {
    pub characters: Vec<Character>,
}

impl ParameterExponents {
    /// Characters sorted, for multiset comparison.
    pub fn sorted(&self) -> Vec<Character> {
        let mut v = self.characters.clone();
        v.sort();
        v
    }
}

/// Restriction to `C^x` of the Langlands parameter of `pi_{a,b}`, `d <= N - 2`.
pub fn parameter_exponents(rep: &CohRep) -> Result<ParameterExponents> {
    let (n, a, b) = (rep.n as i64, rep.a as i64, rep.b as i64);
    if rep.degree() + 1 == rep.n {
        return Err(Error::DiscreteSeries { n_minus_one: rep.n - 1, a: rep.a, b: rep.b });
    }
    let r = n - (a + b) - 1;
    let mut characters = vec![Character { twist_doubled: b - a, r }, Character { twist_doubled: b - a, r: -r }];
    let excluded = [n - 1 - 2 * a, -n + 1 + 2 * b];
    characters.extend(
        (-n + 1..=n - 1)
            .step_by(2)
            .filter(|j| !excluded.contains(j))
            .map(|j| Character { twist_doubled: j, r: 0 }),
    );
    Ok(ParameterExponents { characters })
}

/// Weyl dimension formula for `U(m)`: `prod_{i<j} (w_i - w_j + j - i)/(j - i)`.
pub fn weyl_dimension(weight: &[i64]) -> Result<BigUint> {
    if weight.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::invalid(format!("weight {weight:?} is not dominant")));
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..weight.len() {
        for j in i + 1..weight.len() {
            num *= weight[i] - weight[j] + (j - i) as i64;
            den *= (j - i) as i64;
        }
    }
    debug_assert!((&num % &den).is_zero() && num.is_positive());
    Ok((num / den).magnitude().clone())
}

/// Highest weight of `tau'_{p,q}` for `U(N-1) x U(1)`, as `N` coordinates:
/// `1` in the first `q` slots, `-1` in slots `N-p..N-1`, `p - q` last.
pub fn lefschetz_weight(n: u32, p: u32, q: u32) -> Result<Vec<i64>> {
    if p + q + 1 > n {
        return Err(Error::invalid(format!("tau'_({p},{q}) needs p + q <= N - 1")));
    }
    let n = n as usize;
    let mut w = vec![0i64; n];
    for x in w.iter_mut().take(q as usize) {
        *x = 1;
    }
    for x in w.iter_mut().take(n - 1).skip(n - 1 - p as usize) {
        *x = -1;
    }
    w[n - 1] = p as i64 - q as i64;
    Ok(w)
}

/// `dim tau'_{p,q}`: the `U(1)` factor is a character.
pub fn lefschetz_dimension(n: u32, p: u32, q: u32) -> Result<BigUint> {
    let w = lefschetz_weight(n, p, q)?;
    weyl_dimension(&w[..w.len() - 1])
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeLefschetzReport {
    pub n: u32,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl HodgeLefschetzReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, for `U(N-1,1)`:
/// the Vandermonde split of `dim wedge^d p`;
/// `C(N-1,a) C(N-1,b) = sum_k dim tau'_{a-k,b-k}`;
/// `tau'_{p,q}` has weight zero iff `p = q = 0`;
/// Hodge table sizes, bidegree multiplicities, decay and parameter invariants.
pub fn verify_hodge_lefschetz(n: u32) -> Result<HodgeLefschetzReport> {
    if !(2..=12).contains(&n) {
        return Err(Error::invalid(format!("N must be in 2..=12, got {n}")));
    }
    let mut report = HodgeLefschetzReport { n, ..Default::default() };
    let mut check = |ok: bool, what: String| {
        report.checks += 1;
        if !ok {
            report.failures.push(what);
        }
    };
    let m = (n - 1) as u64;
    for d in 0..=2 * m {
        let split: BigUint = (0..=d).map(|a| binomial(m, a) * binomial(m, d - a)).sum();
        check(split == binomial(2 * m, d), format!("Vandermonde fails at d = {d}"));
    }
    for rep in CohRep::all(n) {
        let (a, b) = (rep.a, rep.b);
        let lhs = binomial(m, a as u64) * binomial(m, b as u64);
        let mut rhs = BigUint::zero();
        for k in 0..=a.min(b) {
            rhs += lefschetz_dimension(n, a - k, b - k)?;
        }
        check(lhs == rhs, format!("branching fails for ({a},{b})"));
        let trivial = lefschetz_weight(n, a, b)?.iter().all(|&x| x == 0);
        check(trivial == (a == 0 && b == 0), format!("tau'_({a},{b}) triviality"));
        let table = hodge_table(&rep);
        check(table.support().len() as u32 == n - rep.degree(), format!("{rep} table size"));
        if rep.degree() > 0 {
            let ok = matches!(decay_exponent(&rep), DecayExponent::Finite(p) if p * rep.degree() as i64 == Rational64::from_integer(2 * (n as i64 - 1)));
            check(ok, format!("{rep} decay exponent"));
        }
        check(multiplicity_exponent(&rep) == Rational64::new(rep.degree() as i64, n as i64 - 1), format!("{rep} 2/p"));
        if rep.degree() + 1 < n {
            let mine = parameter_exponents(&rep)?;
            let swapped = parameter_exponents(&CohRep::new(n, b, a)?)?;
            let mut mirrored: Vec<Character> =
                swapped.characters.iter().map(|c| Character { twist_doubled: -c.twist_doubled, r: c.r }).collect();
            mirrored.sort();
            check(mine.characters.len() == n as usize, format!("{rep} parameter length"));
            check(mine.characters.iter().filter(|c| c.r != 0).count() == 2, format!("{rep} nontempered count"));
            check(mine.sorted() == mirrored, format!("{rep} parameter symmetry"));
        }
    }
    for p in 0..n {
        for q in 0..n {
            let scanned = CohRep::all(n).iter().filter(|r| hodge_table(r).get(p, q) == 1).count() as u32;
            check(scanned == bidegree_multiplicity(n, p, q), format!("multiplicity at ({p},{q})"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(n: u32, a: u32, b: u32) -> CohRep {
        CohRep::new(n, a, b).unwrap()
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(hodge_table(&rep(3, 0, 0)).support(), vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(hodge_table(&rep(3, 1, 0)).support(), vec![(1, 0), (2, 1)]);
        assert_eq!(hodge_table(&rep(2, 1, 0)).support(), vec![(1, 0)]);
        assert!(CohRep::new(3, 2, 1).is_err());
    }

    #[test]
    fn degree_examples() {
        let names = |n, d| -> Vec<String> { reps_in_degree(n, d).unwrap().iter().map(|(r, _)| r.to_string()).collect() };
        assert_eq!(names(3, 0), vec!["pi_(0,0)"]);
        assert_eq!(names(3, 2), vec!["pi_(0,0)", "pi_(0,2)", "pi_(1,1)", "pi_(2,0)"]);
        assert_eq!(names(4, 1), vec!["pi_(0,1)", "pi_(1,0)"]);
    }

    #[test]
    fn decay_examples() {
        assert_eq!(decay_exponent(&rep(3, 1, 0)), DecayExponent::Finite(Rational64::from_integer(4)));
        assert_eq!(decay_exponent(&rep(3, 1, 1)), DecayExponent::Finite(Rational64::from_integer(2)));
        assert_eq!(decay_exponent(&rep(5, 0, 0)), DecayExponent::Infinite);
    }

    #[test]
    fn parameter_examples() {
        let c = |t, r| Character { twist_doubled: t, r };
        assert_eq!(parameter_exponents(&rep(3, 0, 0)).unwrap().characters, vec![c(0, 2), c(0, -2), c(0, 0)]);
        let p = parameter_exponents(&rep(4, 1, 0)).unwrap();
        assert_eq!(p.characters, vec![c(-1, 2), c(-1, -2), c(-1, 0), c(3, 0)]);
        assert!(matches!(parameter_exponents(&rep(3, 1, 1)), Err(Error::DiscreteSeries { .. })));
    }

    #[test]
    fn weyl_examples() {
        assert_eq!(weyl_dimension(&[1, -1]).unwrap(), BigUint::from(3u32));
        assert_eq!(weyl_dimension(&[0, 0, 0, 0]).unwrap(), BigUint::one());
        assert_eq!(weyl_dimension(&[1, 0, -1]).unwrap(), BigUint::from(8u32));
        assert!(weyl_dimension(&[0, 1]).is_err());
    }

    #[test]
    fn branching_n3() {
        // C(2,1)^2 = 4 = dim tau'_{1,1} + dim tau'_{0,0}
        assert_eq!(lefschetz_dimension(3, 1, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(lefschetz_dimension(3, 0, 0).unwrap(), BigUint::one());
        assert!(verify_hodge_lefschetz(5).unwrap().passed());
    }

    #[test]
    fn bidegree_counts() {
        assert_eq!(bidegree_multiplicity(3, 1, 1), 2);
        assert_eq!(bidegree_multiplicity(3, 2, 2), 1);
        assert_eq!(bidegree_multiplicity(3, 0, 2), 1);
        assert_eq!(bidegree_multiplicity(3, 2, 1), 1);
    }
}
