//! Formula paths against full enumeration on small rings.

use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;

use super::constraint::{Composition, ValuationConstraint};
use super::enumerate::{count_constrained, count_invertible, coset_count, flag_count};
use super::index::{constrained_subgroup_order, double_coset_count, gaussian_multinomial, gl_order, parabolic_index};
use super::orbit::matrix_space_size;
use crate::error::{Error, Result};
use crate::residue::PrimePower;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexQuantity {
    GlOrder,
    Parabolic(Composition),
    /// Points of the flag variety over `F_p`; only meaningful at `n = 1`.
    FlagCount(Composition),
    SubgroupOrder(ValuationConstraint),
    DoubleCosets(ValuationConstraint),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexFixture {
    pub size: usize,
    pub ring: PrimePower,
    pub quantity: IndexQuantity,
}

impl IndexFixture {
    /// Work of the enumeration path: the size of the matrix space.
    pub fn enumeration_size(&self) -> u128 {
        matrix_space_size(self.size, self.ring.modulus())
    }
}

impl fmt::Display for IndexFixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, n, s) = (self.ring.p(), self.ring.n(), self.size);
        match &self.quantity {
            IndexQuantity::GlOrder => write!(f, "gl_order GL{s}(Z/{p}^{n})"),
            IndexQuantity::Parabolic(c) => write!(f, "parabolic_index {:?} GL{s}(Z/{p}^{n})", c.parts()),
            IndexQuantity::FlagCount(c) => write!(f, "flag_count {:?} F_{p}^{s}", c.parts()),
            IndexQuantity::SubgroupOrder(c) => write!(f, "subgroup_order {c} GL{s}(Z/{p}^{n})"),
            IndexQuantity::DoubleCosets(c) => write!(f, "double_cosets {c} GL{s}(Z/{p}^{n})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexAgreement {
    pub fixture: IndexFixture,
    pub formula: BigUint,
    pub enumerated: BigUint,
}

impl IndexAgreement {
    pub fn agrees(&self) -> bool {
        self.formula == self.enumerated
    }
}

/// Evaluates one fixture both ways.
pub fn check_fixture(fx: &IndexFixture, guard: u64) -> Result<IndexAgreement> {
    let size = fx.enumeration_size();
    if size > guard as u128 {
        return Err(Error::Infeasible { what: fx.to_string(), size, guard: guard as u128 });
    }
    let (formula, enumerated) = match &fx.quantity {
        IndexQuantity::GlOrder => (gl_order(fx.size, fx.ring), BigUint::from(count_invertible(fx.size, fx.ring, guard)?)),
        IndexQuantity::Parabolic(comp) => {
            let formula = parabolic_index(fx.size, comp, fx.ring)?;
            let cons = ValuationConstraint::parabolic(comp, fx.ring.n())?;
            (formula, BigUint::from(coset_count(&cons, fx.ring, guard)?))
        }
        IndexQuantity::FlagCount(comp) => {
            (gaussian_multinomial(comp.parts(), fx.ring.p()), BigUint::from(flag_count(comp, fx.ring.p())?))
        }
        IndexQuantity::SubgroupOrder(cons) => (
            constrained_subgroup_order(cons, fx.ring, guard)?,
            BigUint::from(count_constrained(cons, fx.ring, guard)?),
        ),
        IndexQuantity::DoubleCosets(cons) => {
            (double_coset_count(cons, fx.ring, guard)?, BigUint::from(coset_count(cons, fx.ring, guard)?))
        }
    };
    Ok(IndexAgreement { fixture: fx.clone(), formula, enumerated })
}

/// Every composition of `m`, in lexicographic order.
pub fn compositions(m: usize) -> Vec<Composition> {
    fn go(rest: usize, acc: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if rest == 0 {
            out.push(Composition::new(acc.clone()).expect("positive parts"));
            return;
        }
        for d in 1..=rest {
            acc.push(d);
            go(rest - d, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(m, &mut Vec::new(), &mut out);
    out
}

/// Constraint grids exercised for `GL_size(Z/p^n)`: every closed off-diagonal
/// grid with entries in `0..=n` (size 2), or the closed grids with entries in
/// `0..=1` (size 3), plus the principal congruence subgroups.
pub fn constraint_family(size: usize, n: u32) -> Vec<ValuationConstraint> {
    let top = if size == 2 { n } else { 1 };
    let off: Vec<usize> = (0..size * size).filter(|i| i / size != i % size).collect();
    let mut out = Vec::new();
    let choices = (top + 1).pow(off.len() as u32);
    for mut code in 0..choices {
        let mut grid = vec![0; size * size];
        for &i in &off {
            grid[i] = code % (top + 1);
            code /= top + 1;
        }
        let cons = ValuationConstraint::new(size, grid).expect("zero diagonal");
        if cons.is_closed() {
            out.push(cons);
        }
    }
    out.extend((1..=n).map(|k| ValuationConstraint::principal(size, k).expect("valid size")));
    out
}

/// The standard fixture list for `GL_size(Z/p^n)`.
pub fn standard_fixtures(size: usize, ring: PrimePower) -> Vec<IndexFixture> {
    let mut out = vec![IndexFixture { size, ring, quantity: IndexQuantity::GlOrder }];
    for c in compositions(size) {
        // the flag oracle lists subspaces as bitmasks over at most 128 points
        if ring.n() == 1 && (ring.p() as u128).pow(size as u32) <= 128 {
            out.push(IndexFixture { size, ring, quantity: IndexQuantity::FlagCount(c.clone()) });
        }
        out.push(IndexFixture { size, ring, quantity: IndexQuantity::Parabolic(c) });
    }
    for cons in constraint_family(size, ring.n()) {
        out.push(IndexFixture { size, ring, quantity: IndexQuantity::SubgroupOrder(cons.clone()) });
        out.push(IndexFixture { size, ring, quantity: IndexQuantity::DoubleCosets(cons) });
    }
    out
}

/// `GL_2` over `Z/p^n` with `p^n <= 27`, and `GL_3` over `F_2`, `F_3`, `Z/4`.
pub fn acceptance_rings() -> Vec<(usize, PrimePower)> {
    let mut out = Vec::new();
    for p in crate::arith::primes_between(2, 27) {
        let mut n = 1;
        while p.pow(n) <= 27 {
            out.push((2, PrimePower::new(p, n).expect("prime")));
            n += 1;
        }
    }
    for (p, n) in [(2, 1), (3, 1), (2, 2)] {
        out.push((3, PrimePower::new(p, n).expect("prime")));
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AgreementReport {
    pub checks: Vec<IndexAgreement>,
    /// Fixtures over the guard, by name.
    pub skipped: Vec<String>,
}

impl AgreementReport {
    pub fn disagreements(&self) -> Vec<&IndexAgreement> {
        self.checks.iter().filter(|c| !c.agrees()).collect()
    }
}

/// Runs the fixtures in parallel; infeasible ones are listed, other errors
/// abort.
pub fn verify_index_oracles(fixtures: &[IndexFixture], guard: u64) -> Result<AgreementReport> {
    let results: Vec<(String, Result<IndexAgreement>)> =
        fixtures.par_iter().map(|fx| (fx.to_string(), check_fixture(fx, guard))).collect();
    let mut report = AgreementReport::default();
    for (name, r) in results {
        match r {
            Ok(c) => report.checks.push(c),
            Err(Error::Infeasible { .. }) => report.skipped.push(name),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
