//! Residue rings `Z/p^n` and truncations `O_L / p_L^t` of quadratic and cubic
//! extensions of `Q_p`, modelled as polynomial quotients.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{inv_mod, is_prime, mul_mod, pow_mod, smallest_nonresidue, vp, DEFAULT_GUARD};
use crate::error::{Error, Result};

/// `Z/p^n` with `p` checked prime and `n >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimePower {
    p: u64,
    n: u32,
}

impl PrimePower {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::invalid("level exponent must be at least 1"));
        }
        match p.checked_pow(n) {
            Some(m) if m <= u32::MAX as u64 => Ok(PrimePower { p, n }),
            _ => Err(Error::invalid(format!("{p}^{n} exceeds 2^32"))),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.n)
    }

    pub fn ring(&self) -> ResidueRing {
        ResidueRing::base(self.p, self.n)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.n)
    }
}

/// `v(0) = Infinite`; ordered so that `Infinite` exceeds every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtensionKind {
    UnramifiedQuadratic,
    RamifiedQuadratic,
    UnramifiedCubic,
    RamifiedCubic,
}

impl ExtensionKind {
    pub fn degree(self) -> usize {
        match self {
            ExtensionKind::UnramifiedQuadratic | ExtensionKind::RamifiedQuadratic => 2,
            ExtensionKind::UnramifiedCubic | ExtensionKind::RamifiedCubic => 3,
        }
    }

    pub fn is_ramified(self) -> bool {
        matches!(self, ExtensionKind::RamifiedQuadratic | ExtensionKind::RamifiedCubic)
    }
}

/// What the generator `x` satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DefiningParameter {
    /// `x^2 = eps`, `eps` a non-residue mod p.
    NonResidue(u64),
    /// `x^k = u p`, `u` a unit mod p.
    UnitMultiplier(u64),
    /// `x^3 + a x^2 + b x + c`, irreducible mod p; stored as `[c, b, a]`.
    Cubic([u64; 3]),
}

/// An extension of `Q_p` of degree 2 or 3, described by the minimal polynomial
/// of a generator of `O_L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtensionModel {
    p: u64,
    kind: ExtensionKind,
    param: DefiningParameter,
    extra_precision: u32,
}

impl ExtensionModel {
    /// Default parameter: smallest non-residue, `u = 1`, or the first
    /// irreducible monic cubic in lexicographic `(a, b, c)` order.
    pub fn new(p: u64, kind: ExtensionKind) -> Result<Self> {
        Self::check_prime(p, kind)?;
        let param = match kind {
            ExtensionKind::UnramifiedQuadratic => DefiningParameter::NonResidue(smallest_nonresidue(p)),
            ExtensionKind::RamifiedQuadratic | ExtensionKind::RamifiedCubic => {
                DefiningParameter::UnitMultiplier(1)
            }
            ExtensionKind::UnramifiedCubic => DefiningParameter::Cubic(first_irreducible_cubic(p)),
        };
        Ok(ExtensionModel { p, kind, param, extra_precision: 2 })
    }

    pub fn with_param(p: u64, kind: ExtensionKind, param: DefiningParameter) -> Result<Self> {
        Self::check_prime(p, kind)?;
        match (kind, param) {
            (ExtensionKind::UnramifiedQuadratic, DefiningParameter::NonResidue(e)) => {
                if e % p == 0 || pow_mod(e, (p - 1) / 2, p) != p - 1 {
                    return Err(Error::invalid(format!("{e} is not a non-residue mod {p}")));
                }
            }
            (
                ExtensionKind::RamifiedQuadratic | ExtensionKind::RamifiedCubic,
                DefiningParameter::UnitMultiplier(u),
            ) => {
                if u % p == 0 {
                    return Err(Error::invalid(format!("{u} is not a unit mod {p}")));
                }
            }
            (ExtensionKind::UnramifiedCubic, DefiningParameter::Cubic(coeffs)) => {
                if (0..p).any(|x| cubic_at(coeffs, x, p) == 0) {
                    return Err(Error::invalid(format!("cubic {coeffs:?} has a root mod {p}")));
                }
            }
            _ => return Err(Error::invalid(format!("parameter {param:?} does not fit {kind:?}"))),
        }
        Ok(ExtensionModel { p, kind, param, extra_precision: 2 })
    }

    /// Digits carried beyond the target when computing norm-one images.
    pub fn with_extra_precision(mut self, extra: u32) -> Self {
        self.extra_precision = extra;
        self
    }

    fn check_prime(p: u64, kind: ExtensionKind) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        match kind {
            ExtensionKind::UnramifiedQuadratic | ExtensionKind::RamifiedQuadratic if p == 2 => {
                Err(Error::invalid("quadratic models need p odd"))
            }
            ExtensionKind::RamifiedCubic if p <= 3 => Err(Error::invalid("ramified cubic models need p > 3")),
            _ => Ok(()),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn kind(&self) -> ExtensionKind {
        self.kind
    }

    pub fn param(&self) -> DefiningParameter {
        self.param
    }

    pub fn extra_precision(&self) -> u32 {
        self.extra_precision
    }

    pub fn ramification(&self) -> u32 {
        if self.kind.is_ramified() {
            self.kind.degree() as u32
        } else {
            1
        }
    }

    /// `x^k = sum relation[i] x^i`, as integers before reduction.
    fn relation(&self) -> [i128; 3] {
        let p = self.p as i128;
        match self.param {
            DefiningParameter::NonResidue(e) => [e as i128, 0, 0],
            DefiningParameter::UnitMultiplier(u) => [u as i128 * p, 0, 0],
            DefiningParameter::Cubic([c, b, a]) => [-(c as i128), -(b as i128), -(a as i128)],
        }
    }

    /// `O_L / p_L^level`.
    pub fn quotient(&self, level: u32) -> ResidueRing {
        let k = self.kind.degree();
        let mut exps = [0u32; 3];
        for (i, e) in exps.iter_mut().enumerate().take(k) {
            *e = if self.kind.is_ramified() {
                (level.saturating_sub(i as u32)).div_ceil(k as u32)
            } else {
                level
            };
        }
        ResidueRing::build(self.p, k, self.kind.is_ramified(), self.relation(), level, exps)
    }

    /// Number of base digits needed to see `p_L^level`.
    fn digits(&self, level: u32) -> u32 {
        level.div_ceil(self.ramification())
    }

    /// Image of the norm-one units of `O_L` in `(O_L / p_L^level)^x`, sorted.
    ///
    /// The kernel of the norm is lifted digit by digit to working precision
    /// `digits(level) + extra` and projected; the projection is recomputed two
    /// digits higher and must agree.
    pub fn norm_one_subgroup(&self, level: u32) -> Result<Vec<RingElem>> {
        self.norm_one_subgroup_guarded(level, DEFAULT_GUARD)
    }

    pub fn norm_one_subgroup_guarded(&self, level: u32, guard: u64) -> Result<Vec<RingElem>> {
        let low = self.digits(level) + self.extra_precision.max(1);
        let high = low + 2;
        let a = self.norm_one_image(level, low, guard)?;
        let b = self.norm_one_image(level, high, guard)?;
        if a != b {
            return Err(Error::PrecisionUnstable { level, low, high });
        }
        Ok(a)
    }

    fn norm_one_image(&self, level: u32, digits: u32, guard: u64) -> Result<Vec<RingElem>> {
        let target = self.quotient(level);
        let kernel = self.truncated_norm_kernel(digits, guard)?;
        let image: BTreeSet<RingElem> = kernel.iter().map(|x| target.reduce(x)).collect();
        Ok(image.into_iter().collect())
    }

    /// `{x in O_L / p^digits : N(x) = 1 mod p^digits}`, built by lifting one
    /// base digit at a time.
    fn truncated_norm_kernel(&self, digits: u32, guard: u64) -> Result<Vec<RingElem>> {
        let k = self.kind.degree();
        let e = self.ramification();
        let fibre = self.p.pow(k as u32);
        let first = self.quotient(e);
        let mut current: Vec<RingElem> = first
            .elements(guard)?
            .into_iter()
            .filter(|x| first.norm(x) == 1 % first.norm_modulus())
            .collect();
        for j in 2..=digits {
            let ring = self.quotient(e * j);
            let work = current.len() as u128 * fibre as u128;
            if work > guard as u128 {
                return Err(Error::Infeasible {
                    what: format!("norm-one lifting to precision {j}"),
                    size: work,
                    guard: guard as u128,
                });
            }
            let step = self.p.pow(j - 1);
            let one = 1 % ring.norm_modulus();
            let mut next = Vec::new();
            for x in &current {
                for z in 0..fibre {
                    let mut c = x.c;
                    let mut rest = z;
                    for ci in c.iter_mut().take(k) {
                        *ci += step * (rest % self.p);
                        rest /= self.p;
                    }
                    let y = RingElem { c };
                    if ring.norm(&y) == one {
                        next.push(y);
                    }
                }
            }
            current = next;
        }
        Ok(current)
    }
}

fn cubic_at(coeffs: [u64; 3], x: u64, p: u64) -> u64 {
    let [c, b, a] = coeffs;
    let x2 = mul_mod(x, x, p);
    (mul_mod(x2, x, p) + mul_mod(a, x2, p) + mul_mod(b, x, p) + c) % p
}

fn first_irreducible_cubic(p: u64) -> [u64; 3] {
    for a in 0..p {
        for b in 0..p {
            for c in 1..p {
                if (0..p).all(|x| cubic_at([c, b, a], x, p) != 0) {
                    return [c, b, a];
                }
            }
        }
    }
    unreachable!("irreducible cubics exist over every prime field")
}

/// Element of a [`ResidueRing`]: coordinates in the basis `1, x, x^2`, each
/// reduced into `[0, p^exps[i])`. Unused coordinates are zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingElem {
    c: [u64; 3],
}

impl RingElem {
    pub fn coords(&self) -> [u64; 3] {
        self.c
    }
}

/// `O / p_O^level` for `O = Z_p` or `O = O_L`, as `Z[x] / (relation, p^M)`
/// with coordinate `i` reduced modulo `p^exps[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueRing {
    p: u64,
    degree: usize,
    ramified: bool,
    level: u32,
    exps: [u32; 3],
    moduli: [u64; 3],
    relation: [u64; 3],
}

impl ResidueRing {
    /// `Z/p^n`; `n = 0` gives the zero ring.
    pub fn base(p: u64, n: u32) -> Self {
        Self::build(p, 1, false, [0, 0, 0], n, [n, 0, 0])
    }

    fn build(p: u64, degree: usize, ramified: bool, rel: [i128; 3], level: u32, exps: [u32; 3]) -> Self {
        let moduli = exps.map(|e| p.pow(e));
        let m = moduli[0] as i128;
        let relation = rel.map(|r| r.rem_euclid(m) as u64);
        ResidueRing { p, degree, ramified, level, exps, moduli, relation }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn ramification(&self) -> u32 {
        if self.ramified {
            self.degree as u32
        } else {
            1
        }
    }

    /// Size of the residue field.
    pub fn residue_cardinality(&self) -> u64 {
        self.p.pow(self.degree as u32 / self.ramification())
    }

    pub fn size(&self) -> u128 {
        self.moduli.iter().take(self.degree).map(|&m| m as u128).product()
    }

    /// Order of the unit group.
    pub fn unit_count(&self) -> u128 {
        if self.level == 0 {
            return 1;
        }
        let q = self.residue_cardinality() as u128;
        self.size() / q * (q - 1)
    }

    /// Modulus of the base quotient receiving norms.
    pub fn norm_modulus(&self) -> u64 {
        self.moduli[0]
    }

    fn modulus(&self) -> u64 {
        self.moduli[0]
    }

    pub fn from_coords(&self, coords: &[i64]) -> RingElem {
        let mut c = [0u64; 3];
        for (i, &x) in coords.iter().enumerate().take(self.degree) {
            c[i] = (x as i128).rem_euclid(self.moduli[i] as i128) as u64;
        }
        RingElem { c }
    }

    pub fn from_int(&self, x: i64) -> RingElem {
        self.from_coords(&[x])
    }

    pub fn zero(&self) -> RingElem {
        RingElem { c: [0; 3] }
    }

    pub fn one(&self) -> RingElem {
        self.from_int(1)
    }

    /// The polynomial generator `x`; in a ramified ring this is the uniformizer.
    pub fn generator(&self) -> RingElem {
        if self.degree == 1 {
            self.from_int(0)
        } else {
            self.from_coords(&[0, 1])
        }
    }

    pub fn uniformizer(&self) -> RingElem {
        if self.ramified {
            self.generator()
        } else {
            self.from_int(self.p as i64)
        }
    }

    /// Mixed-radix position of `x` in `elements`.
    pub fn index_of(&self, x: &RingElem) -> usize {
        let mut idx = 0u128;
        for i in (0..self.degree).rev() {
            idx = idx * self.moduli[i] as u128 + x.c[i] as u128;
        }
        idx as usize
    }

    pub fn element(&self, mut idx: usize) -> RingElem {
        let mut c = [0u64; 3];
        for (i, ci) in c.iter_mut().enumerate().take(self.degree) {
            let m = self.moduli[i] as usize;
            *ci = (idx % m) as u64;
            idx /= m;
        }
        RingElem { c }
    }

    /// All elements in index order; refused past `guard`.
    pub fn elements(&self, guard: u64) -> Result<Vec<RingElem>> {
        let size = self.size();
        if size > guard as u128 {
            return Err(Error::Infeasible {
                what: format!("enumerating a residue ring of size {size}"),
                size,
                guard: guard as u128,
            });
        }
        Ok((0..size as usize).map(|i| self.element(i)).collect())
    }

    fn reduce_coords(&self, c: [u64; 3]) -> RingElem {
        let mut out = [0u64; 3];
        for i in 0..self.degree {
            out[i] = c[i] % self.moduli[i];
        }
        RingElem { c: out }
    }

    /// Projection from a finer quotient of the same ring.
    pub fn reduce(&self, x: &RingElem) -> RingElem {
        self.reduce_coords(x.c)
    }

    pub fn add(&self, x: &RingElem, y: &RingElem) -> RingElem {
        let mut c = [0u64; 3];
        for i in 0..self.degree {
            c[i] = (x.c[i] + y.c[i]) % self.moduli[i];
        }
        RingElem { c }
    }

    pub fn neg(&self, x: &RingElem) -> RingElem {
        let mut c = [0u64; 3];
        for i in 0..self.degree {
            c[i] = (self.moduli[i] - x.c[i]) % self.moduli[i];
        }
        RingElem { c }
    }

    pub fn sub(&self, x: &RingElem, y: &RingElem) -> RingElem {
        self.add(x, &self.neg(y))
    }

    /// Polynomial product modulo the relation and `p^exps[0]`, unreduced
    /// in the higher coordinates.
    fn mul_full(&self, x: &[u64; 3], y: &[u64; 3]) -> [u64; 3] {
        let m = self.modulus();
        let k = self.degree;
        let mut prod = [0u64; 5];
        for i in 0..k {
            for j in 0..k {
                prod[i + j] = (prod[i + j] + mul_mod(x[i], y[j], m)) % m;
            }
        }
        for d in (k..2 * k - 1).rev() {
            let top = prod[d];
            prod[d] = 0;
            for i in 0..k {
                let t = d - k + i;
                prod[t] = (prod[t] + mul_mod(top, self.relation[i], m)) % m;
            }
        }
        [prod[0], prod[1], prod[2]]
    }

    pub fn mul(&self, x: &RingElem, y: &RingElem) -> RingElem {
        self.reduce_coords(self.mul_full(&x.c, &y.c))
    }

    pub fn scale(&self, s: u64, x: &RingElem) -> RingElem {
        let mut c = [0u64; 3];
        for i in 0..self.degree {
            c[i] = mul_mod(s % self.moduli[i], x.c[i], self.moduli[i]);
        }
        RingElem { c }
    }

    pub fn pow(&self, x: &RingElem, mut e: u128) -> RingElem {
        let mut acc = self.one();
        let mut base = *x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn valuation(&self, x: &RingElem) -> Valuation {
        let mut best: Option<u32> = None;
        for i in 0..self.degree {
            if x.c[i] == 0 {
                continue;
            }
            let v = vp(x.c[i], self.p);
            let v = if self.ramified { self.degree as u32 * v + i as u32 } else { v };
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        match best {
            Some(v) => Valuation::Finite(v),
            None => Valuation::Infinite,
        }
    }

    pub fn is_unit(&self, x: &RingElem) -> bool {
        self.level == 0 || self.valuation(x) == Valuation::Finite(0)
    }

    pub fn inverse(&self, x: &RingElem) -> Option<RingElem> {
        if !self.is_unit(x) {
            return None;
        }
        if self.degree == 1 {
            return inv_mod(x.c[0], self.modulus()).map(|v| RingElem { c: [v % self.modulus().max(1), 0, 0] });
        }
        Some(self.pow(x, self.unit_count() - 1))
    }

    /// `x -> x-bar` for quadratic rings (`x^2` lies in the base).
    pub fn conjugate(&self, x: &RingElem) -> Option<RingElem> {
        if self.degree != 2 {
            return None;
        }
        Some(RingElem { c: [x.c[0], (self.moduli[1] - x.c[1]) % self.moduli[1], 0] })
    }

    /// Norm to `Z / p^exps[0]`: determinant of multiplication by `x`.
    pub fn norm(&self, x: &RingElem) -> u64 {
        let m = self.modulus();
        let k = self.degree;
        if m == 1 {
            return 0;
        }
        let mut cols = [[0u64; 3]; 3];
        let mut basis = [1u64, 0, 0];
        for col in cols.iter_mut().take(k) {
            *col = self.mul_full(&x.c, &basis);
            basis = self.mul_full(&basis, &[0, 1, 0]);
        }
        let a = |r: usize, c: usize| cols[c][r] as i128;
        let det = match k {
            1 => a(0, 0),
            2 => a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0),
            _ => {
                let mm = m as i128;
                let t1 = a(0, 0) * ((a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) % mm) % mm;
                let t2 = a(0, 1) * ((a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) % mm) % mm;
                let t3 = a(0, 2) * ((a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)) % mm) % mm;
                t1 - t2 + t3
            }
        };
        det.rem_euclid(m as i128) as u64
    }

    pub fn render(&self, x: &RingElem) -> String {
        if self.degree == 1 {
            return x.c[0].to_string();
        }
        let parts: Vec<String> = (0..self.degree).map(|i| x.c[i].to_string()).collect();
        format!("({})", parts.join(","))
    }
}
