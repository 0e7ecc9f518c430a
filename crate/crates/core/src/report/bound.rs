//! The headline degree-wise growth bound, its level-dependent factor, and the
//! comparison with the volume-exponent prediction.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::{BigRational, Rational64};
use serde::{Deserialize, Serialize};

use crate::arith::{big_pow, is_prime, one_plus_over, rat_from_uint};
use crate::error::{Error, Result};
use crate::shapes::{shape_rows, Exponent, ShapeRow};

/// Largest rank the bound is computed for.
pub const MAX_BOUND_RANK: u32 = 14;

/// Level as a product of `q_v^{n_v}` over split places, with the `q_v` powers
/// of pairwise distinct primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    factors: Vec<(u64, u32)>,
}

fn prime_of_power(q: u64) -> Option<u64> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut r = q;
    while r % p == 0 {
        r /= p;
    }
    (r == 1 && is_prime(p)).then_some(p)
}

impl Level {
    pub fn new(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut primes = Vec::new();
        for &(q, n) in &factors {
            let p = prime_of_power(q).ok_or_else(|| Error::invalid(format!("{q} is not a prime power")))?;
            if n == 0 {
                return Err(Error::invalid(format!("exponent of {q} must be >= 1")));
            }
            if primes.contains(&p) {
                return Err(Error::invalid(format!("two factors at the prime {p}")));
            }
            primes.push(p);
        }
        Ok(Level { factors })
    }

    /// The unit ideal.
    pub fn trivial() -> Self {
        Level { factors: Vec::new() }
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// `N n = prod q_v^{n_v}`.
    pub fn norm(&self) -> BigUint {
        self.factors.iter().map(|&(q, n)| big_pow(q, n)).product()
    }
}

impl FromStr for Level {
    type Err = Error;

    /// `q^n,q^n,...`; a bare `q` means `q^1`; the empty string is the unit ideal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::trivial());
        }
        let factors = s
            .split(',')
            .map(|part| {
                let part = part.trim();
                let (q, n) = part.split_once('^').unwrap_or((part, "1"));
                let q = q.trim().parse::<u64>().map_err(|_| Error::invalid(format!("bad level factor {part:?}")))?;
                let n = n.trim().parse::<u32>().map_err(|_| Error::invalid(format!("bad level factor {part:?}")))?;
                Ok((q, n))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(q, n)| format!("{q}^{n}")).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub n: u32,
    pub d: u32,
    pub rows: Vec<ShapeRow>,
    /// Max over rows; `Nd + 1`.
    pub headline: Exponent,
    /// Exponent `s` of the per-place factor: `-1` for `(1 - 1/q_v)`, else
    /// `(1 + 1/q_v)^s`. Taken from the extremal row with the largest `s`.
    pub factor_exponent: i64,
    /// `(Nd/(N^2-1), d/(N-1))`, absent at `d = 0`.
    pub volume_ratio: Option<(Rational64, Rational64)>,
    pub level: Level,
    /// `prod_v factor(q_v) * (N n)^{headline}`.
    pub value: BigRational,
}

impl BoundReport {
    pub fn exceptional_factor(&self) -> bool {
        self.factor_exponent >= 0
    }
}

/// `(1 - 1/q)` for `s = -1`, `(1 + 1/q)^s` for `s >= 0`.
pub fn place_factor(q: u64, s: i64) -> BigRational {
    if s < 0 {
        one_plus_over(q, -1, 1)
    } else {
        one_plus_over(q, 1, s as i32)
    }
}

fn check_degree(n: u32, d: u32) -> Result<()> {
    if !(2..=MAX_BOUND_RANK).contains(&n) {
        return Err(Error::invalid(format!("rank {n} outside 2..={MAX_BOUND_RANK}")));
    }
    if d == n - 1 {
        return Err(Error::MiddleDegree { degree: d });
    }
    if d > n - 1 {
        return Err(Error::invalid(format!("degree {d} above the middle degree {}", n - 1)));
    }
    Ok(())
}

pub fn theorem_bound(n: u32, d: u32, level: &Level) -> Result<BoundReport> {
    check_degree(n, d)?;
    let rows = shape_rows(n, d)?;
    let headline = rows.iter().map(|r| r.governing.exponent).max().expect("nonempty");
    if headline != Exponent::exact((n * d) as i64 + 1) {
        return Err(Error::invalid(format!("headline {headline} at ({n},{d}) is not Nd + 1")));
    }
    let factor_exponent = rows
        .iter()
        .filter(|r| r.extremal)
        .map(|r| r.governing.sigma_prime)
        .max()
        .expect("some row is extremal");
    let mut value = rat_from_uint(&level.norm().pow(headline.value as u32));
    for &(q, _) in level.factors() {
        value *= place_factor(q, factor_exponent);
    }
    let volume_ratio = (d >= 1).then(|| volume_comparison(n, d)).transpose()?;
    Ok(BoundReport { n, d, rows, headline, factor_exponent, volume_ratio, level: level.clone(), value })
}

/// `(Nd/(N^2-1), d/(N-1))`; the first is strictly smaller.
pub fn volume_comparison(n: u32, d: u32) -> Result<(Rational64, Rational64)> {
    if n < 3 || d == 0 || d >= n - 1 {
        return Err(Error::invalid(format!("comparison needs 1 <= d < N-1, got N={n} d={d}")));
    }
    let (n, d) = (n as i64, d as i64);
    let ours = Rational64::new(n * d, n * n - 1);
    let predicted = Rational64::new(d, n - 1);
    if ours >= predicted {
        return Err(Error::invalid(format!("{ours} is not below {predicted}")));
    }
    Ok((ours, predicted))
}

/// Exponent of the level norm in the volume: `N^2 - 1`.
pub fn volume_exponent(n: u32) -> Result<u32> {
    if n < 2 {
        return Err(Error::invalid("volume exponent needs N >= 2"));
    }
    Ok(n * n - 1)
}

/// The headline exponent as a power of the volume, `(Nd+1)/(N^2-1)`; the
/// `1/(N^2-1)` excess is what the `+eps` form absorbs.
pub fn volume_form(n: u32, d: u32) -> Result<Rational64> {
    check_degree(n, d)?;
    Ok(Rational64::new((n * d) as i64 + 1, volume_exponent(n)? as i64))
}

/// The middle degree grows like the volume itself.
pub fn middle_degree_note(n: u32) -> Result<String> {
    let v = volume_exponent(n)?;
    Ok(format!("h^{} grows like vol, i.e. like N(n)^{v}", n - 1))
}

#[cfg(test)]
mod tests {
    use num_traits::One;

    use super::*;

    #[test]
    fn level_parsing() {
        let l: Level = "5^1, 7^2".parse().unwrap();
        assert_eq!(l.norm(), BigUint::from(245u32));
        assert_eq!(l.to_string(), "5^1,7^2");
        assert_eq!("9".parse::<Level>().unwrap().factors(), &[(9, 1)]);
        assert!("5,25".parse::<Level>().is_err());
        assert!("6^1".parse::<Level>().is_err());
        assert!("5^0".parse::<Level>().is_err());
        assert_eq!("".parse::<Level>().unwrap().norm(), BigUint::one());
    }

    #[test]
    fn bound_examples() {
        let r = theorem_bound(3, 1, &"5".parse().unwrap()).unwrap();
        assert_eq!(r.headline, Exponent::exact(4));
        assert_eq!(r.value, BigRational::from_integer(500.into()));
        assert!(!r.exceptional_factor());
        let r = theorem_bound(4, 2, &"3^2".parse().unwrap()).unwrap();
        assert_eq!(r.headline, Exponent::exact(9));
        assert_eq!(r.factor_exponent, 1);
        assert_eq!(r.value, BigRational::from_integer(BigUint::from(3u32).pow(18).into()) * one_plus_over(3, 1, 1));
        assert_eq!(theorem_bound(3, 0, &Level::trivial()).unwrap().headline, Exponent::exact(1));
        assert!(matches!(theorem_bound(3, 2, &Level::trivial()), Err(Error::MiddleDegree { degree: 2 })));
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(volume_comparison(3, 1).unwrap(), (Rational64::new(3, 8), Rational64::new(1, 2)));
        assert!(Rational64::new(3, 8) < Rational64::new(7, 12));
        assert_eq!(volume_comparison(5, 2).unwrap(), (Rational64::new(5, 12), Rational64::new(1, 2)));
        assert!(volume_comparison(3, 2).is_err());
        assert_eq!(volume_exponent(3).unwrap(), 8);
        assert_eq!(volume_exponent(2).unwrap(), 3);
        assert_eq!(volume_form(3, 1).unwrap(), Rational64::new(1, 2));
    }
}
