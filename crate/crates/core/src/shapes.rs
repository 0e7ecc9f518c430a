//! Shapes `(n_1, m_1), ..., (n_k, m_k)` with `sum n_i m_i = N` and the
//! exponent systems attached to a designated first pair.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest rank accepted by the enumerators.
pub const MAX_RANK: u32 = 16;

/// `n` is the size of the Arthur `SL_2` factor, `m` the cuspidal degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pair {
    pub n: u32,
    pub m: u32,
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

/// Multiset of pairs, kept sorted descending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    pairs: Vec<Pair>,
}

impl Shape {
    pub fn new(mut pairs: Vec<Pair>) -> Result<Self> {
        if pairs.is_empty() || pairs.iter().any(|p| p.n == 0 || p.m == 0) {
            return Err(Error::invalid("a shape needs at least one pair, all entries positive"));
        }
        pairs.sort_by(|a, b| b.cmp(a));
        Ok(Shape { pairs })
    }

    pub fn from_tuples(pairs: &[(u32, u32)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(n, m)| Pair { n, m }).collect())
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn rank(&self) -> u32 {
        self.pairs.iter().map(|p| p.n * p.m).sum()
    }

    /// One designation per distinct pair, in shape order.
    pub fn designations(&self) -> Vec<DesignatedShape> {
        let mut out: Vec<DesignatedShape> = Vec::new();
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 && self.pairs[i - 1] == *p {
                continue;
            }
            out.push(DesignatedShape { shape: self.clone(), designated: i });
        }
        out
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(Pair::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A shape with one pair singled out as `(n_1, m_1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DesignatedShape {
    shape: Shape,
    designated: usize,
}

impl DesignatedShape {
    pub fn new(shape: Shape, first: Pair) -> Result<Self> {
        let designated = shape
            .pairs
            .iter()
            .position(|p| *p == first)
            .ok_or_else(|| Error::invalid(format!("{first} is not a pair of {shape}")))?;
        Ok(DesignatedShape { shape, designated })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn first(&self) -> Pair {
        self.shape.pairs[self.designated]
    }

    /// The pairs other than the designated one.
    pub fn rest(&self) -> impl Iterator<Item = Pair> + '_ {
        self.shape.pairs.iter().enumerate().filter(move |&(i, _)| i != self.designated).map(|(_, p)| *p)
    }

    pub fn profile(&self) -> ExponentProfile {
        exponent_profile(self)
    }
}

impl fmt::Display for DesignatedShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .shape
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| if i == self.designated { format!("{p}*") } else { p.to_string() })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Integer exponent, possibly with an infinitesimal `+eps`; ordered
/// lexicographically, so `x + eps <= y` iff `x < y` and `x + eps` never
/// equals an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Exponent {
    pub value: i64,
    pub plus_epsilon: bool,
}

impl Exponent {
    pub fn exact(value: i64) -> Self {
        Exponent { value, plus_epsilon: false }
    }

    pub fn with_epsilon(value: i64) -> Self {
        Exponent { value, plus_epsilon: true }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.plus_epsilon {
            write!(f, "{}+eps", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentProfile {
    pub rank: u32,
    pub tau: i64,
    pub tau1: i64,
    pub tau2: i64,
    /// Carries `+eps`.
    pub tau3: Exponent,
    pub sigma: i64,
    pub sigma1: i64,
    pub sigma2: i64,
    pub sigma3: i64,
    pub tau_prime: i64,
    pub tau_prime1: i64,
    pub tau_prime2: i64,
    /// Carries `+eps`.
    pub tau_prime3: Exponent,
    /// `sigma - sum n_i`; always `-1`.
    pub sigma_prime: i64,
    pub sigma_prime1: i64,
    pub sigma_prime2: i64,
    pub sigma_prime3: i64,
    /// `m_1` of the designated pair.
    pub first_degree: u32,
}

/// Which exponent bounds the contribution of a designated shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Governing {
    pub exponent: Exponent,
    /// Exponent of `(1 + 1/q)`; `-1` stands for the `(1 - 1/q)` factor.
    pub sigma_prime: i64,
    /// `Some(l)` when `tau'_l` governs (`m_1 = l <= 3`), `None` for `tau'`.
    pub family: Option<u32>,
}

impl ExponentProfile {
    pub fn governing(&self) -> Governing {
        match self.first_degree {
            1 => Governing { exponent: Exponent::exact(self.tau_prime1), sigma_prime: self.sigma_prime1, family: Some(1) },
            2 => Governing { exponent: Exponent::exact(self.tau_prime2), sigma_prime: self.sigma_prime2, family: Some(2) },
            3 => Governing { exponent: self.tau_prime3, sigma_prime: self.sigma_prime3, family: Some(3) },
            _ => Governing { exponent: Exponent::exact(self.tau_prime), sigma_prime: self.sigma_prime, family: None },
        }
    }
}

fn choose2(x: i64) -> i64 {
    x * (x - 1) / 2
}

pub fn exponent_profile(s: &DesignatedShape) -> ExponentProfile {
    let big_n = s.shape.rank() as i64;
    let first = s.first();
    let (n1, m1) = (first.n as i64, first.m as i64);
    let rest: Vec<(i64, i64)> = s.rest().map(|p| (p.n as i64, p.m as i64)).collect();
    let all = s.shape.pairs.iter().map(|p| (p.n as i64, p.m as i64));

    let sum_nm2: i64 = all.clone().map(|(n, m)| n * m * m).sum();
    let sum_n: i64 = all.map(|(n, _)| n).sum();
    let rest_n: i64 = rest.iter().map(|(n, _)| n).sum();
    let rest_nm2: i64 = rest.iter().map(|(n, m)| n * m * m).sum();
    let rest_choose: i64 = rest.iter().map(|&(n, m)| n * choose2(m)).sum();

    let tau = (big_n * big_n - sum_nm2) / 2;
    let tau1 = choose2(big_n) - choose2(n1) - rest_choose;
    let tau2 = tau + n1 - 1;
    let tau3 = tau + 4 * (n1 - 1);
    let sigma = sum_n - 1;
    let sigma1 = rest_n;
    let sigma2 = 2 * (n1 - 1) + rest_n;
    let sigma3 = sigma;
    let tail = m1 * m1 + rest_nm2;
    ExponentProfile {
        rank: big_n as u32,
        tau,
        tau1,
        tau2,
        tau3: Exponent::with_epsilon(tau3),
        sigma,
        sigma1,
        sigma2,
        sigma3,
        tau_prime: tau + sum_nm2,
        tau_prime1: tau1 + tail,
        tau_prime2: tau2 + tail,
        tau_prime3: Exponent::with_epsilon(tau3 + tail),
        sigma_prime: sigma - sum_n,
        sigma_prime1: sigma1 - 1 - rest_n,
        sigma_prime2: sigma2 - 1 - rest_n,
        sigma_prime3: sigma3 - 1 - rest_n,
        first_degree: first.m,
    }
}

fn check_rank(n: u32, max: u32) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::invalid(format!("rank must be in 1..={max}, got {n}")));
    }
    Ok(())
}

/// Every shape of rank `n`, in descending lexicographic order of pair lists.
pub fn enumerate_shapes(n: u32) -> Result<Vec<Shape>> {
    check_rank(n, MAX_RANK)?;
    let mut candidates: Vec<Pair> =
        (1..=n).flat_map(|a| (1..=n / a).map(move |m| Pair { n: a, m })).collect();
    candidates.sort_by(|a, b| b.cmp(a));
    let mut out = Vec::new();
    let mut stack = Vec::new();
    extend(&candidates, 0, n, &mut stack, &mut out);
    Ok(out)
}

fn extend(candidates: &[Pair], from: usize, remaining: u32, stack: &mut Vec<Pair>, out: &mut Vec<Shape>) {
    if remaining == 0 {
        out.push(Shape { pairs: stack.clone() });
        return;
    }
    for (i, &p) in candidates.iter().enumerate().skip(from) {
        if p.n * p.m <= remaining {
            stack.push(p);
            extend(candidates, i, remaining - p.n * p.m, stack, out);
            stack.pop();
        }
    }
}

fn check_degree(n: u32, d: u32) -> Result<()> {
    if n < 2 || d + 1 >= n {
        return Err(Error::invalid(format!("need 0 <= d < N-1, got N={n}, d={d}")));
    }
    Ok(())
}

/// Designated shapes whose first pair has `n_1 >= N - d`, one per qualifying
/// distinct pair.
pub fn admissible_shapes(n: u32, d: u32) -> Result<Vec<DesignatedShape>> {
    check_degree(n, d)?;
    Ok(enumerate_shapes(n)?
        .into_iter()
        .flat_map(|s| s.designations())
        .filter(|ds| ds.first().n + d >= n)
        .collect())
}

/// Every designation of every shape, with no admissibility filter.
pub fn all_designations(n: u32) -> Result<Vec<DesignatedShape>> {
    Ok(enumerate_shapes(n)?.into_iter().flat_map(|s| s.designations()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaFinding {
    pub rank: u32,
    pub degree: u32,
    pub shape: String,
    pub exponent: Exponent,
    pub bound: Exponent,
    pub note: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombLemmaReport {
    pub max_rank: u32,
    /// `(N, d, designated shape)` triples examined.
    pub checked: usize,
    pub violations: Vec<LemmaFinding>,
    /// Rows attaining `Nd + 1`.
    pub witnesses: Vec<LemmaFinding>,
}

impl CombLemmaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The two equality families at `(N, d)`: `(N-d,1),(1,d)` (just `(N,1)` when
/// `d = 0`), and `(2,2)` when `N = 4`, `d = 2`.
pub fn equality_family(n: u32, d: u32) -> Vec<DesignatedShape> {
    let mut out = Vec::new();
    let lead = Pair { n: n - d, m: 1 };
    let pairs = if d == 0 { vec![lead] } else { vec![lead, Pair { n: 1, m: d }] };
    out.push(DesignatedShape::new(Shape::new(pairs).expect("valid"), lead).expect("lead present"));
    if n == 4 && d == 2 {
        let p = Pair { n: 2, m: 2 };
        out.push(DesignatedShape::new(Shape::new(vec![p]).expect("valid"), p).expect("present"));
    }
    out
}

/// For every `N <= max_rank`, `0 <= d < N - 1` and admissible designation,
/// checks `tau' <= Nd` (`m_1 >= 4`) or `tau'_l <= Nd (+eps if l = 3)`, with
/// `Nd + 1` allowed exactly on the equality families.
pub fn verify_comb_lemma(max_rank: u32) -> Result<CombLemmaReport> {
    check_rank(max_rank, 14)?;
    let per_rank: Vec<(usize, Vec<LemmaFinding>, Vec<LemmaFinding>)> = (2..=max_rank)
        .into_par_iter()
        .map(|n| {
            let mut checked = 0;
            let mut violations = Vec::new();
            let mut witnesses = Vec::new();
            for d in 0..n - 1 {
                let expected = equality_family(n, d);
                let mut seen = vec![false; expected.len()];
                for ds in admissible_shapes(n, d).expect("degree in range") {
                    checked += 1;
                    let g = ds.profile().governing();
                    let nd = (n * d) as i64;
                    let bound = Exponent { value: nd, plus_epsilon: g.family == Some(3) };
                    let finding = |note: &str| LemmaFinding {
                        rank: n,
                        degree: d,
                        shape: ds.to_string(),
                        exponent: g.exponent,
                        bound,
                        note: note.to_string(),
                    };
                    let slot = expected.iter().position(|e| *e == ds);
                    if g.exponent <= bound {
                        if slot.is_some() {
                            violations.push(finding("equality family stays below Nd + 1"));
                        }
                    } else if g.exponent == Exponent::exact(nd + 1) {
                        match slot {
                            Some(i) => {
                                seen[i] = true;
                                witnesses.push(finding("equality"));
                            }
                            None => violations.push(finding("Nd + 1 outside the equality families")),
                        }
                    } else {
                        violations.push(finding("exceeds Nd + 1"));
                    }
                }
                for (e, hit) in expected.iter().zip(seen) {
                    if !hit {
                        violations.push(LemmaFinding {
                            rank: n,
                            degree: d,
                            shape: e.to_string(),
                            exponent: e.profile().governing().exponent,
                            bound: Exponent::exact((n * d) as i64 + 1),
                            note: "equality family not attained".into(),
                        });
                    }
                }
            }
            (checked, violations, witnesses)
        })
        .collect();
    let mut report = CombLemmaReport { max_rank, ..Default::default() };
    for (c, v, w) in per_rank {
        report.checked += c;
        report.violations.extend(v);
        report.witnesses.extend(w);
    }
    Ok(report)
}

/// Row of the per-shape table behind the headline exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeRow {
    pub shape: DesignatedShape,
    pub governing: Governing,
    pub extremal: bool,
}

/// Rows for all admissible designations at `(N, d)`, marking those that attain
/// the maximum exponent.
pub fn shape_rows(n: u32, d: u32) -> Result<Vec<ShapeRow>> {
    let shapes = admissible_shapes(n, d)?;
    let mut rows: Vec<ShapeRow> = shapes
        .into_iter()
        .map(|shape| {
            let governing = shape.profile().governing();
            ShapeRow { shape, governing, extremal: false }
        })
        .collect();
    let top = rows.iter().map(|r| r.governing.exponent).max().expect("at least one admissible shape");
    for r in &mut rows {
        r.extremal = r.governing.exponent == top;
    }
    Ok(rows)
}

/// Largest governing exponent over all designations, admissible or not.
pub fn unfiltered_max(n: u32) -> Result<Exponent> {
    Ok(all_designations(n)?
        .iter()
        .map(|ds| ds.profile().governing().exponent)
        .max()
        .expect("every rank has a shape"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn designated(pairs: &[(u32, u32)], first: (u32, u32)) -> DesignatedShape {
        DesignatedShape::new(Shape::from_tuples(pairs).unwrap(), Pair { n: first.0, m: first.1 }).unwrap()
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_shapes(1).unwrap(), vec![Shape::from_tuples(&[(1, 1)]).unwrap()]);
        let two: Vec<String> = enumerate_shapes(2).unwrap().iter().map(Shape::to_string).collect();
        assert_eq!(two, vec!["{(2,1)}", "{(1,2)}", "{(1,1),(1,1)}"]);
        assert_eq!(enumerate_shapes(3).unwrap().len(), 5);
        assert!(enumerate_shapes(17).is_err());
    }

    #[test]
    fn profile_examples() {
        let p = designated(&[(2, 1), (1, 1)], (2, 1)).profile();
        assert_eq!((p.tau, p.tau1, p.tau_prime1, p.sigma1, p.sigma_prime1), (3, 2, 4, 1, -1));
        let p = designated(&[(2, 2)], (2, 2)).profile();
        assert_eq!((p.tau, p.tau2, p.tau_prime2, p.sigma2, p.sigma_prime2), (4, 5, 9, 2, 1));
        let p = designated(&[(2, 4)], (2, 4)).profile();
        assert_eq!(p.tau_prime, 48);
        assert_eq!(p.governing().exponent, Exponent::exact(48));
        assert_eq!(p.sigma_prime, -1);
    }

    #[test]
    fn epsilon_ordering() {
        assert!(Exponent::with_epsilon(4) < Exponent::exact(5));
        assert!(Exponent::with_epsilon(4) > Exponent::exact(4));
        assert_ne!(Exponent::with_epsilon(4), Exponent::exact(4));
        assert!(Exponent::with_epsilon(4) <= Exponent::with_epsilon(4));
    }

    #[test]
    fn admissible_examples() {
        let s = |n, d| -> Vec<String> { admissible_shapes(n, d).unwrap().iter().map(|x| x.to_string()).collect() };
        assert_eq!(s(3, 0), vec!["{(3,1)*}"]);
        assert_eq!(s(3, 1), vec!["{(3,1)*}", "{(2,1)*,(1,1)}"]);
        let four = s(4, 2);
        for want in ["{(2,2)*}", "{(2,1)*,(1,2)}", "{(2,1)*,(1,1),(1,1)}", "{(2,1)*,(2,1)}", "{(3,1)*,(1,1)}", "{(4,1)*}"] {
            assert!(four.contains(&want.to_string()), "{want} missing from {four:?}");
        }
        assert!(admissible_shapes(4, 3).is_err());
    }

    #[test]
    fn lemma_small_ranks() {
        let r = verify_comb_lemma(10).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
        assert!(r.witnesses.iter().any(|w| w.rank == 4 && w.degree == 2 && w.shape == "{(2,2)*}"));
        assert!(r.witnesses.iter().any(|w| w.rank == 5 && w.degree == 1 && w.shape == "{(4,1)*,(1,1)}"));
    }

    #[test]
    fn rows_mark_extremal() {
        let rows = shape_rows(3, 1).unwrap();
        let top: Vec<_> = rows.iter().filter(|r| r.extremal).collect();
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].governing.exponent, Exponent::exact(4));
    }
}
