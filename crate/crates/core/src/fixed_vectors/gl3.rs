//! Cocharacter cells for `GL_3` and exact double-coset counts against the
//! per-cell bounds used in Howe's construction.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, one_plus_over, rat_from_uint, rat_pow_u};
use crate::error::{Error, Result};
use crate::groups::{double_coset_count, ValuationConstraint};
use crate::residue::PrimePower;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Normalization {
    /// `lambda_3 = 0`, `lambda_1 >= lambda_2 >= lambda_3`.
    DominantModCenter,
    /// `lambda_1 + lambda_2 + lambda_3 = 0`.
    TraceZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cocharacter {
    lambda: [i64; 3],
    normalization: Normalization,
}

impl Cocharacter {
    pub fn new(lambda: [i64; 3], normalization: Normalization) -> Result<Self> {
        let ok = match normalization {
            Normalization::DominantModCenter => lambda[2] == 0 && lambda[0] >= lambda[1] && lambda[1] >= 0,
            Normalization::TraceZero => lambda.iter().sum::<i64>() == 0,
        };
        if !ok {
            return Err(Error::invalid(format!("{lambda:?} is not {normalization:?}")));
        }
        Ok(Cocharacter { lambda, normalization })
    }

    pub fn lambda(&self) -> [i64; 3] {
        self.lambda
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }
}

impl fmt::Display for Cocharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.lambda;
        write!(f, "({a},{b},{c})")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum HoweCase {
    Unramified,
    Ramified,
}

impl fmt::Display for HoweCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HoweCase::Unramified => "unramified",
            HoweCase::Ramified => "ramified",
        })
    }
}

/// The combinatorial shadow of an admissible character of a cubic extension:
/// which extension, the conductor `j`, and the residue cardinality `q`.
///
/// Ramified data have `j >= 2` and `j mod 3 in {0, 2}`; a conductor
/// `j = 1 mod 3` is reduced away by twisting before it reaches this type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HoweDatum {
    case: HoweCase,
    j: u32,
    q: u64,
}

impl HoweDatum {
    pub fn new(case: HoweCase, j: u32, q: u64) -> Result<Self> {
        if !is_prime_power(q) {
            return Err(Error::invalid(format!("q = {q} is not a prime power")));
        }
        match case {
            HoweCase::Unramified if j == 0 => Err(Error::invalid("unramified conductor must be >= 1")),
            HoweCase::Ramified if j < 2 => Err(Error::invalid("ramified conductor must be >= 2")),
            HoweCase::Ramified if j % 3 == 1 => {
                Err(Error::invalid(format!("ramified conductor {j} = 1 mod 3 reduces to a smaller one")))
            }
            _ => Ok(HoweDatum { case, j, q }),
        }
    }

    pub fn case(&self) -> HoweCase {
        self.case
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `floor(j / 3)` for ramified data.
    pub fn i(&self) -> Option<u32> {
        (self.case == HoweCase::Ramified).then_some(self.j / 3)
    }
}

pub(crate) fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q).find(|d| q % d == 0).expect("q >= 2 has a divisor");
    let mut r = q;
    while r % p == 0 {
        r /= p;
    }
    r == 1 && is_prime(p)
}

/// Conductors with a nonempty candidate set at level `n`: `1..=n` unramified,
/// `2..=3n-2` avoiding `1 mod 3` ramified.
pub fn admissible_conductors(case: HoweCase, n: u32) -> Vec<u32> {
    match case {
        HoweCase::Unramified => (1..=n).collect(),
        HoweCase::Ramified => (2..=(3 * n).saturating_sub(2)).filter(|j| j % 3 != 1).collect(),
    }
}

/// Cocharacters whose cell can support invariant vectors, sorted.
pub fn lambda_candidates(datum: &HoweDatum, n: u32) -> Result<Vec<Cocharacter>> {
    if n == 0 {
        return Err(Error::invalid("level n must be >= 1"));
    }
    let n_i = n as i64;
    let j = datum.j as i64;
    let mut out = Vec::new();
    match datum.case {
        HoweCase::Unramified => {
            let top = n_i - j;
            for g1 in 0..=top {
                for g2 in 0..=top {
                    out.push(Cocharacter::new([g1 + g2, g2, 0], Normalization::DominantModCenter)?);
                }
            }
            if out.len() as u64 > (n as u64).pow(2) {
                return Err(Error::invalid(format!("{} unramified candidates exceed n^2", out.len())));
            }
        }
        HoweCase::Ramified => {
            let i = j / 3;
            let cap = n_i - i - 1;
            // a = l1 - l2, b = l2 - l3 lie in [-3n, 3n] whenever cap >= -1
            let span = 3 * n_i + 3;
            for a in -span..=span {
                for b in -span..=span {
                    let c = -a - b;
                    let fits = if datum.j % 3 == 2 {
                        a.max(b).max(c + 1) <= cap
                    } else {
                        (-a).max(-b).max(-c - 1) <= cap
                    };
                    // l3 = t, l2 = t + b, l1 = t + a + b with 3t + a + 2b = 0
                    if fits && (a + 2 * b).rem_euclid(3) == 0 {
                        let t = -(a + 2 * b) / 3;
                        out.push(Cocharacter::new([t + a + b, t + b, t], Normalization::TraceZero)?);
                    }
                }
            }
            if out.len() as u64 > 9 * (n as u64).pow(2) {
                return Err(Error::invalid(format!("{} ramified candidates exceed 9n^2", out.len())));
            }
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MaximalCompact {
    /// `GL_3(R)`.
    Hyperspecial,
    /// Lower-triangular Iwahori.
    Iwahori,
}

/// Grid of `lambda^-1 M lambda ∩ GL_3(R)` with `M` the given maximal compact:
/// `c_ab = max(lambda_b - lambda_a + s_ab, 0)` capped at `n`, where
/// `s_ab = 1` for `a < b` in the Iwahori case and `0` otherwise.
pub fn klambda_constraint(lambda: &Cocharacter, variant: MaximalCompact, n: u32) -> Result<ValuationConstraint> {
    let l = lambda.lambda;
    let grid = (0..9)
        .map(|idx| {
            let (a, b) = (idx / 3, idx % 3);
            if a == b {
                return 0;
            }
            let shift = i64::from(variant == MaximalCompact::Iwahori && a < b);
            (l[b] - l[a] + shift).max(0) as u32
        })
        .collect();
    Ok(ValuationConstraint::new(3, grid)?.capped(n))
}

/// The per-cell double-coset bound: `q^{4n-4j}(1+1/q)^3` unramified,
/// `q^{3n-2i}(1+1/q)^3` for `j = 3i` and `q^{3n-2i-2}(1+1/q)^3` for
/// `j = 3i+2` ramified.
pub fn cell_bound(datum: &HoweDatum, n: u32) -> BigRational {
    let q = datum.q;
    let cube = one_plus_over(q, 1, 3);
    let (n, j) = (n as i64, datum.j as i64);
    let exp = match datum.case {
        HoweCase::Unramified => 4 * n - 4 * j,
        HoweCase::Ramified if j % 3 == 0 => 3 * n - 2 * (j / 3),
        HoweCase::Ramified => 3 * n - 2 * (j / 3) - 2,
    };
    signed_pow(q, exp) * cube
}

pub(crate) fn signed_pow(q: u64, e: i64) -> BigRational {
    let x = rat_pow_u(q, e.unsigned_abs() as u32);
    if e < 0 {
        x.recip()
    } else {
        x
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCosetRow {
    pub case: HoweCase,
    pub j: u32,
    pub lambda: Cocharacter,
    pub constraint: ValuationConstraint,
    pub count: BigUint,
    pub bound: BigRational,
}

impl DoubleCosetRow {
    pub fn within(&self) -> bool {
        rat_from_uint(&self.count) <= self.bound
    }

    pub fn ratio(&self) -> BigRational {
        rat_from_uint(&self.count) / &self.bound
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCosetReport {
    pub p: u64,
    pub n: u32,
    /// False for `p in {2, 3}`: the counts are still exact but the bounds are
    /// only claimed for `p > 3`.
    pub in_scope: bool,
    /// Sorted by `(case, j, lambda)`.
    pub rows: Vec<DoubleCosetRow>,
    /// `(case, j, candidate count, cap)` with cap `n^2` or `9n^2`.
    pub candidate_counts: Vec<(HoweCase, u32, usize, u64)>,
}

impl DoubleCosetReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(DoubleCosetRow::within)
            && self.candidate_counts.iter().all(|&(_, _, k, cap)| k as u64 <= cap)
    }

    pub fn violations(&self) -> Vec<&DoubleCosetRow> {
        self.rows.iter().filter(|r| !r.within()).collect()
    }
}

/// Exact `|K_lambda \ GL_3(Z_p) / K_n|` for every candidate in both cases,
/// compared with the cell bound.
pub fn verify_double_coset_lemmas(p: u64, n: u32, guard: u64) -> Result<DoubleCosetReport> {
    let pp = PrimePower::new(p, n)?;
    let mut cells = Vec::new();
    let mut candidate_counts = Vec::new();
    for case in [HoweCase::Unramified, HoweCase::Ramified] {
        for j in admissible_conductors(case, n) {
            let datum = HoweDatum::new(case, j, p)?;
            let lambdas = lambda_candidates(&datum, n)?;
            let cap = match case {
                HoweCase::Unramified => (n as u64).pow(2),
                HoweCase::Ramified => 9 * (n as u64).pow(2),
            };
            candidate_counts.push((case, j, lambdas.len(), cap));
            cells.extend(lambdas.into_iter().map(|l| (datum, l)));
        }
    }
    let rows = cells
        .into_par_iter()
        .map(|(datum, lambda)| {
            let variant = match datum.case {
                HoweCase::Unramified => MaximalCompact::Hyperspecial,
                HoweCase::Ramified => MaximalCompact::Iwahori,
            };
            let constraint = klambda_constraint(&lambda, variant, n)?;
            let count = double_coset_count(&constraint, pp, guard)?;
            Ok(DoubleCosetRow { case: datum.case, j: datum.j, lambda, constraint, count, bound: cell_bound(&datum, n) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DoubleCosetReport { p, n, in_scope: p > 3, rows, candidate_counts })
}
