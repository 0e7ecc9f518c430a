//! Dimensions of the inducing data in Howe's construction and the `GL_3`
//! fixed-vector bounds assembled from them.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::gl3::{admissible_conductors, cell_bound, is_prime_power, lambda_candidates, HoweCase, HoweDatum};
use crate::arith::{big_pow, one_plus_over, rat_from_uint, rat_pow_u};
use crate::error::{Error, Result};

/// `dim W(psi')`:
/// unramified `j` even `q^{3j-3}(q-1)(q^2-1)`, `j = 2i+1 >= 3`
/// `q^{6i}(q-1)(q^2-1)`, `j = 1` `(q^2-1)(q-1)`; ramified `(q-1)^2 q^{j-2}`.
pub fn howe_dimension(datum: &HoweDatum) -> BigUint {
    let q = datum.q();
    let j = datum.j();
    let torus = BigUint::from(q - 1) * BigUint::from(q * q - 1);
    match datum.case() {
        HoweCase::Unramified if j % 2 == 0 => big_pow(q, 3 * j - 3) * torus,
        HoweCase::Unramified => big_pow(q, 3 * (j - 1)) * torus,
        HoweCase::Ramified => BigUint::from(q - 1).pow(2) * big_pow(q, j - 2),
    }
}

/// `q^{3j}` unramified, `q^j` ramified.
pub fn howe_dimension_cap(datum: &HoweDatum) -> BigUint {
    match datum.case() {
        HoweCase::Unramified => big_pow(datum.q(), 3 * datum.j()),
        HoweCase::Ramified => big_pow(datum.q(), datum.j()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Gl3Case {
    PrincipalSeries,
    Induced21,
    SupercuspidalUnramified,
    SupercuspidalRamified,
}

impl Gl3Case {
    pub const ALL: [Gl3Case; 4] = [
        Gl3Case::PrincipalSeries,
        Gl3Case::Induced21,
        Gl3Case::SupercuspidalUnramified,
        Gl3Case::SupercuspidalRamified,
    ];
}

impl fmt::Display for Gl3Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gl3Case::PrincipalSeries => "principal-series",
            Gl3Case::Induced21 => "induced-2-1",
            Gl3Case::SupercuspidalUnramified => "supercuspidal-unramified",
            Gl3Case::SupercuspidalRamified => "supercuspidal-ramified",
        })
    }
}

impl std::str::FromStr for Gl3Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Gl3Case::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::invalid(format!("unknown GL3 case {s:?}")))
    }
}

fn check_q_n(q: u64, n: u32) -> Result<()> {
    if !is_prime_power(q) {
        return Err(Error::invalid(format!("q = {q} is not a prime power")));
    }
    if n == 0 {
        return Err(Error::invalid("level n must be >= 1"));
    }
    Ok(())
}

/// Bound on `dim pi^{K_n}` for one case. The ramified supercuspidal case
/// has no admissible conductor at `n = 1` and its bound is then zero.
pub fn gl3_case_bound(case: Gl3Case, q: u64, n: u32) -> Result<BigRational> {
    check_q_n(q, n)?;
    let nn = BigRational::from_integer((n as u64 * n as u64).into());
    let cube = one_plus_over(q, 1, 3);
    Ok(match case {
        Gl3Case::PrincipalSeries => rat_pow_u(q, 3 * n) * cube,
        Gl3Case::Induced21 => {
            rat_pow_u(q, 2 * n) * one_plus_over(q, 1, 2) * rat_pow_u(q, n) * one_plus_over(q, 1, 1)
        }
        Gl3Case::SupercuspidalUnramified => (1..=n)
            .map(|j| &nn * rat_pow_u(q, 4 * n - j) * &cube)
            .max()
            .expect("n >= 1"),
        Gl3Case::SupercuspidalRamified => admissible_conductors(HoweCase::Ramified, n)
            .into_iter()
            .map(|j| BigRational::from_integer(9.into()) * &nn * rat_pow_u(q, 3 * n + j / 3) * &cube)
            .max()
            .unwrap_or_else(BigRational::zero),
    })
}

/// Product of the actual candidate count, the cell bound and the exact
/// Howe dimension for one conductor.
pub fn assembled_bound(datum: &HoweDatum, n: u32) -> Result<BigRational> {
    let count = lambda_candidates(datum, n)?.len() as u64;
    Ok(BigRational::from_integer(count.into()) * cell_bound(datum, n) * rat_from_uint(&howe_dimension(datum)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformBound {
    pub q: u64,
    pub n: u32,
    /// `9 n^2 q^{4n} (1 + 1/q)^3`.
    pub value: BigRational,
    pub cases: Vec<(Gl3Case, BigRational)>,
    /// Largest assembled product over supercuspidal conductors.
    pub assembled_max: BigRational,
    /// Growth of a single generic representation, `q^{3n}`.
    pub individual: BigRational,
    /// Plancherel bound, order `q^{8n}`.
    pub trivial: BigRational,
}

impl UniformBound {
    pub fn cases_within(&self) -> bool {
        self.cases.iter().all(|(_, b)| b <= &self.value) && self.assembled_max <= self.value
    }

    /// `q^{3n} <= value <= q^{8n}`.
    pub fn ordering_holds(&self) -> bool {
        self.individual <= self.value && self.value <= self.trivial
    }

    pub fn ordering_strict(&self) -> bool {
        self.individual < self.value && self.value < self.trivial
    }
}

pub fn gl3_uniform_bound(q: u64, n: u32) -> Result<UniformBound> {
    check_q_n(q, n)?;
    let value =
        BigRational::from_integer((9 * n as u64 * n as u64).into()) * rat_pow_u(q, 4 * n) * one_plus_over(q, 1, 3);
    let cases = Gl3Case::ALL.into_iter().map(|c| Ok((c, gl3_case_bound(c, q, n)?))).collect::<Result<Vec<_>>>()?;
    let mut assembled_max = BigRational::zero();
    for case in [HoweCase::Unramified, HoweCase::Ramified] {
        for j in admissible_conductors(case, n) {
            let b = assembled_bound(&HoweDatum::new(case, j, q)?, n)?;
            assembled_max = assembled_max.max(b);
        }
    }
    Ok(UniformBound {
        q,
        n,
        value,
        cases,
        assembled_max,
        individual: rat_pow_u(q, 3 * n),
        trivial: rat_pow_u(q, 8 * n),
    })
}

/// Whether `9 n^2 (1+1/q)^3 <= q^{eps n}` for `eps = num/den`, i.e. the
/// uniform bound is at most `q^{(4+eps)n}` with constant 1.
pub fn unit_constant_holds(q: u64, n: u32, eps_num: u32, eps_den: u32) -> Result<bool> {
    check_q_n(q, n)?;
    if eps_den == 0 {
        return Err(Error::invalid("epsilon denominator must be positive"));
    }
    let lhs = BigRational::from_integer((9 * n as u64 * n as u64).into()) * one_plus_over(q, 1, 3);
    // compare lhs^den with q^{num n}
    Ok(num_traits::pow(lhs, eps_den as usize) <= rat_pow_u(q, eps_num * n))
}
