//! Verification suite: every verifier in the crate, grouped by scope, run
//! under a budget and memoized per fixture.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bound::{volume_comparison, theorem_bound, Level};
use super::cache::{Cache, CacheStatus};
use super::document::{row, ReportDocument, Row};
use crate::arith::{approx6, primes_between, rat_from_uint, rat_string, DEFAULT_GUARD};
use crate::cohomology::verify_hodge_lefschetz;
use crate::error::{Error, Result};
use crate::fixed_vectors::gl2::{ramified_orbits, supercuspidal_bound, unramified_orbits, OrbitCheck};
use crate::fixed_vectors::gl3::{verify_double_coset_lemmas, HoweCase, HoweDatum};
use crate::fixed_vectors::howe::{gl3_uniform_bound, howe_dimension, howe_dimension_cap};
use crate::groups::agreement::{acceptance_rings, check_fixture, standard_fixtures};
use crate::shapes::{unfiltered_max, verify_comb_lemma, Exponent};

/// Bumped whenever a cached outcome's meaning changes.
const CACHE_EPOCH: &str = "v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Shapes,
    Cohomology,
    Gl2,
    Gl3,
    Indices,
    All,
}

impl Scope {
    pub const SECTIONS: [Scope; 5] = [Scope::Shapes, Scope::Cohomology, Scope::Gl2, Scope::Gl3, Scope::Indices];

    fn sections(self) -> Vec<Scope> {
        if self == Scope::All {
            Self::SECTIONS.to_vec()
        } else {
            vec![self]
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Shapes => "shapes",
            Scope::Cohomology => "cohomology",
            Scope::Gl2 => "gl2",
            Scope::Gl3 => "gl3",
            Scope::Indices => "indices",
            Scope::All => "all",
        })
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::SECTIONS
            .into_iter()
            .chain([Scope::All])
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::invalid(format!("unknown scope {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest enumeration any single fixture may perform.
    pub guard: u64,
    /// Largest prime for the local computations.
    pub pmax: u64,
    /// Largest level; `None` uses each scope's default.
    pub nmax: Option<u32>,
    /// Largest rank for the shape and Hodge sweeps.
    pub rank_max: u32,
    /// Largest residue ring for the norm-one orbit counts.
    pub ring_max: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { guard: DEFAULT_GUARD, pmax: 7, nmax: None, rank_max: 12, ring_max: 7u128.pow(6) }
    }
}

/// What one fixture contributes to the report; this is what gets cached.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureOutcome {
    pub rows: Vec<Row>,
    pub passed: u64,
    pub failed: u64,
    pub exact_values: Vec<(String, String)>,
}

impl FixtureOutcome {
    fn check(&mut self, ok: bool, cells: Row) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        let mut r = cells;
        r.insert("status".into(), if ok { "pass" } else { "FAIL" }.into());
        self.rows.push(r);
    }

    fn exact(&mut self, key: impl ToString, value: impl ToString) {
        self.exact_values.push((key.to_string(), value.to_string()));
    }
}

type Runner = Box<dyn Fn() -> Result<FixtureOutcome> + Send + Sync>;

struct Fixture {
    section: Scope,
    key: String,
    run: Runner,
}

fn fixture(section: Scope, key: String, run: impl Fn() -> Result<FixtureOutcome> + Send + Sync + 'static) -> Fixture {
    Fixture { section, key, run: Box::new(run) }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub document: ReportDocument,
    /// Fixture keys over the guard.
    pub skipped: Vec<String>,
    pub cache_hits: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteStatus {
    Pass,
    Fail,
    BudgetExceeded,
}

impl SuiteReport {
    /// A failed assertion outranks skipped fixtures.
    pub fn status(&self) -> SuiteStatus {
        if !self.document.passed() {
            SuiteStatus::Fail
        } else if !self.skipped.is_empty() {
            SuiteStatus::BudgetExceeded
        } else {
            SuiteStatus::Pass
        }
    }

    /// The document, or `budget-exceeded` when anything was skipped.
    pub fn into_result(self) -> Result<ReportDocument> {
        if self.skipped.is_empty() {
            Ok(self.document)
        } else {
            Err(Error::BudgetExceeded { skipped: self.skipped })
        }
    }
}

pub fn run_verification_suite(scope: Scope, budget: &Budget, cache: Option<&Cache>) -> Result<SuiteReport> {
    let fixtures: Vec<Fixture> = scope.sections().into_iter().flat_map(|s| fixtures_for(s, budget)).collect();
    let results: Vec<(Result<FixtureOutcome>, bool)> = fixtures
        .par_iter()
        .map(|fx| {
            let module = fx.section.to_string();
            let key = format!("{CACHE_EPOCH} {}", fx.key);
            match cache {
                Some(c) => match c.load::<FixtureOutcome>(&module, &key) {
                    Some(hit) => (Ok(hit), true),
                    None => ((fx.run)(), false),
                },
                None => ((fx.run)(), false),
            }
        })
        .collect();

    let mut doc = ReportDocument::new(format!("verify {scope}"));
    doc.param("scope", scope)
        .param("guard", budget.guard)
        .param("pmax", budget.pmax)
        .param("nmax", budget.nmax.map_or("default".to_string(), |n| n.to_string()))
        .param("rank_max", budget.rank_max)
        .param("ring_max", budget.ring_max);
    let mut skipped = Vec::new();
    let mut cache_hits = 0;
    // sequential from here on: deterministic order and a single cache writer
    for (fx, (result, hit)) in fixtures.iter().zip(results) {
        match result {
            Ok(outcome) => {
                if hit {
                    cache_hits += 1;
                } else if let Some(c) = cache {
                    c.store(&fx.section.to_string(), &format!("{CACHE_EPOCH} {}", fx.key), &outcome)?;
                }
                doc.assertions.passed += outcome.passed;
                doc.assertions.failed += outcome.failed;
                for mut r in outcome.rows {
                    r.insert_before(0, "fixture".into(), fx.key.clone());
                    r.insert_before(0, "section".into(), fx.section.to_string());
                    doc.rows.push(r);
                }
                doc.exact_values.extend(outcome.exact_values);
            }
            Err(Error::Infeasible { .. }) => {
                doc.assertions.skipped += 1;
                skipped.push(fx.key.clone());
            }
            Err(e) => {
                doc.assertions.failed += 1;
                doc.rows.push(row([
                    ("section", fx.section.to_string()),
                    ("fixture", fx.key.clone()),
                    ("error", e.to_string()),
                    ("status", "FAIL".into()),
                ]));
            }
        }
    }
    Ok(SuiteReport { document: doc, skipped, cache_hits })
}

/// Cached lookups through [`Cache::get_or_compute`] for single values outside
/// the suite.
pub fn cached<T, F>(cache: Option<&Cache>, module: &str, key: &str, f: F) -> Result<(T, CacheStatus)>
where
    T: Serialize + serde::de::DeserializeOwned,
    F: FnOnce() -> Result<T>,
{
    match cache {
        Some(c) => c.get_or_compute(module, &format!("{CACHE_EPOCH} {key}"), f),
        None => Ok((f()?, CacheStatus::Miss)),
    }
}

fn fixtures_for(section: Scope, b: &Budget) -> Vec<Fixture> {
    match section {
        Scope::Shapes => shape_fixtures(b),
        Scope::Cohomology => cohomology_fixtures(b),
        Scope::Gl2 => gl2_fixtures(b),
        Scope::Gl3 => gl3_fixtures(b),
        Scope::Indices => index_fixtures(b),
        Scope::All => unreachable!("expanded by sections()"),
    }
}

fn shape_fixtures(b: &Budget) -> Vec<Fixture> {
    let rank = b.rank_max.clamp(2, 14);
    let mut out = vec![fixture(Scope::Shapes, format!("comb-lemma N<={rank}"), move || {
        let report = verify_comb_lemma(rank)?;
        let mut o = FixtureOutcome::default();
        for v in &report.violations {
            o.check(false, row([("N", v.rank.to_string()), ("d", v.degree.to_string()), ("shape", v.shape.clone()), ("note", v.note.clone())]));
        }
        let two_by_two = report.witnesses.iter().any(|w| w.shape == "{(2,2)*}");
        let families = 1 + usize::from(two_by_two);
        o.check(report.passed(), row([("check", "comb-lemma"), ("checked", &report.checked.to_string()), ("violations", &report.violations.len().to_string()), ("equality_families", &families.to_string())]));
        o.exact(format!("shapes.checked.N<={rank}"), report.checked);
        o.exact(format!("shapes.violations.N<={rank}"), report.violations.len());
        o.exact(format!("shapes.equality_families.N<={rank}"), families);
        Ok(o)
    })];
    out.push(fixture(Scope::Shapes, format!("headline N<={rank}"), move || {
        let mut o = FixtureOutcome::default();
        for n in 2..=rank {
            for d in 0..n - 1 {
                let r = theorem_bound(n, d, &Level::trivial())?;
                let ok = r.headline == Exponent::exact((n * d) as i64 + 1) && r.exceptional_factor() == ((n, d) == (4, 2));
                o.check(ok, row([("check", "headline".to_string()), ("N", n.to_string()), ("d", d.to_string()), ("headline", r.headline.to_string()), ("factor_exponent", r.factor_exponent.to_string())]));
            }
        }
        Ok(o)
    }));
    let top = rank.min(8);
    out.push(fixture(Scope::Shapes, format!("filter-matters N<={top}"), move || {
        let mut o = FixtureOutcome::default();
        let mut witness = None;
        for n in 3..=top {
            let unfiltered = unfiltered_max(n)?;
            for d in 0..n - 1 {
                if unfiltered > Exponent::exact((n * d) as i64 + 1) && witness.is_none() {
                    witness = Some((n, d, unfiltered));
                }
            }
        }
        let cells = witness.map_or_else(
            || row([("check", "filter-matters".to_string())]),
            |(n, d, u)| row([("check", "filter-matters".to_string()), ("N", n.to_string()), ("d", d.to_string()), ("unfiltered", u.to_string())]),
        );
        o.check(witness.is_some(), cells);
        Ok(o)
    }));
    out
}

fn cohomology_fixtures(b: &Budget) -> Vec<Fixture> {
    let rank = b.rank_max.clamp(2, 12);
    let mut out: Vec<Fixture> = (2..=rank)
        .map(|n| {
            fixture(Scope::Cohomology, format!("hodge-lefschetz N={n}"), move || {
                let r = verify_hodge_lefschetz(n)?;
                let mut o = FixtureOutcome::default();
                o.check(r.passed(), row([("check", "hodge-lefschetz".to_string()), ("N", n.to_string()), ("checks", r.checks.to_string()), ("failures", r.failures.join("; "))]));
                Ok(o)
            })
        })
        .collect();
    out.push(fixture(Scope::Cohomology, format!("below-volume-prediction N<={rank}"), move || {
        let mut o = FixtureOutcome::default();
        for n in 3..=rank {
            for d in 1..n - 1 {
                let (ours, predicted) = volume_comparison(n, d)?;
                o.check(ours < predicted, row([("check", "volume-ratio".to_string()), ("N", n.to_string()), ("d", d.to_string()), ("ours", ours.to_string()), ("predicted", predicted.to_string())]));
            }
        }
        let (ours, _) = volume_comparison(3, 1)?;
        let theirs = Rational64::new(7, 12);
        o.check(ours < theirs, row([("check", "known-exponent".to_string()), ("N", "3".into()), ("d", "1".into()), ("ours", ours.to_string()), ("predicted", theirs.to_string())]));
        Ok(o)
    }));
    out
}

fn orbit_row(c: &OrbitCheck) -> Row {
    row([
        ("check", "norm-one-orbits".to_string()),
        ("p", c.p.to_string()),
        ("extension", format!("{:?} {:?}", c.kind, c.param)),
        ("ring_level", c.ring_level.to_string()),
        ("ring_size", c.ring_size.to_string()),
        ("brute_force", c.brute_force.to_string()),
        ("closed_form", c.closed_form.to_string()),
    ])
}

fn gl2_fixtures(b: &Budget) -> Vec<Fixture> {
    let mut out = Vec::new();
    for p in primes_between(3, b.pmax) {
        let q2 = (p as u128).pow(2);
        let mut a = 0u32;
        while q2.pow(a) <= b.ring_max && b.nmax.is_none_or(|n| a <= n) {
            let guard = b.guard;
            out.push(fixture(Scope::Gl2, format!("unramified p={p} a={a}"), move || {
                let c = unramified_orbits(p, a, guard)?;
                let mut o = FixtureOutcome::default();
                o.check(c.agrees(), orbit_row(&c));
                Ok(o)
            }));
            a += 1;
        }
        let mut n = 1u32;
        while (p as u128).pow(2 * n - 1) <= b.ring_max && b.nmax.is_none_or(|m| n <= m) {
            let guard = b.guard;
            out.push(fixture(Scope::Gl2, format!("ramified p={p} n={n}"), move || {
                let mut o = FixtureOutcome::default();
                for c in ramified_orbits(p, n, guard)? {
                    o.check(c.agrees(), orbit_row(&c));
                }
                Ok(o)
            }));
            n += 1;
        }
        let top = b.nmax.unwrap_or(4);
        out.push(fixture(Scope::Gl2, format!("supercuspidal p={p} n<={top}"), move || {
            let mut o = FixtureOutcome::default();
            for n in 1..=top {
                let s = supercuspidal_bound(p, n)?;
                o.check(s.components_within(), row([
                    ("check", "supercuspidal-components".to_string()),
                    ("p", p.to_string()),
                    ("n", n.to_string()),
                    ("unramified", format!("{}+{}", s.unramified[0], s.unramified[1])),
                    ("ramified", format!("{}+{}", s.ramified[0], s.ramified[1])),
                    ("bound", rat_string(&s.bound)),
                ]));
            }
            Ok(o)
        }));
    }
    out
}

fn gl3_fixtures(b: &Budget) -> Vec<Fixture> {
    let mut out = Vec::new();
    let top = b.nmax.unwrap_or(2);
    for p in primes_between(5, b.pmax) {
        for n in 1..=top {
            let guard = b.guard;
            out.push(fixture(Scope::Gl3, format!("double-cosets p={p} n={n}"), move || {
                let r = verify_double_coset_lemmas(p, n, guard)?;
                let mut o = FixtureOutcome::default();
                for &(case, j, count, cap) in &r.candidate_counts {
                    o.check(count as u64 <= cap, row([("check", "candidates".to_string()), ("p", p.to_string()), ("n", n.to_string()), ("case", case.to_string()), ("j", j.to_string()), ("count", count.to_string()), ("cap", cap.to_string())]));
                }
                for cell in &r.rows {
                    o.check(cell.within(), row([
                        ("check", "double-cosets".to_string()),
                        ("p", p.to_string()),
                        ("n", n.to_string()),
                        ("case", cell.case.to_string()),
                        ("j", cell.j.to_string()),
                        ("lambda", cell.lambda.to_string()),
                        ("count", cell.count.to_string()),
                        ("bound", rat_string(&cell.bound)),
                        ("ratio_approx6", approx6(&cell.ratio())),
                    ]));
                }
                Ok(o)
            }));
        }
    }
    let qs: Vec<u64> = primes_between(5, b.pmax.max(13));
    let uniform_top = b.nmax.unwrap_or(4);
    out.push(fixture(Scope::Gl3, format!("uniform q<={} n<={uniform_top}", qs.last().copied().unwrap_or(0)), move || {
        let mut o = FixtureOutcome::default();
        for &q in &qs {
            for n in 1..=uniform_top {
                let u = gl3_uniform_bound(q, n)?;
                o.check(u.cases_within() && u.ordering_holds(), row([
                    ("check", "uniform".to_string()),
                    ("q", q.to_string()),
                    ("n", n.to_string()),
                    ("bound", rat_string(&u.value)),
                    ("individual", rat_string(&u.individual)),
                    ("trivial", rat_string(&u.trivial)),
                    ("bound_approx6", approx6(&u.value)),
                ]));
                if n == 1 {
                    o.exact(format!("gl3.uniform.q={q}.n=1"), rat_string(&u.value));
                }
            }
        }
        Ok(o)
    }));
    out.push(fixture(Scope::Gl3, "howe-dimensions j<=9".into(), || {
        let mut o = FixtureOutcome::default();
        for q in [5u64, 7, 11] {
            for j in 1..=9 {
                for case in [HoweCase::Unramified, HoweCase::Ramified] {
                    let Ok(d) = HoweDatum::new(case, j, q) else { continue };
                    let dim = howe_dimension(&d);
                    let cap = howe_dimension_cap(&d);
                    o.check(dim <= cap, row([("check", "howe-dimension".to_string()), ("q", q.to_string()), ("case", case.to_string()), ("j", j.to_string()), ("dimension", dim.to_string()), ("cap", cap.to_string())]));
                }
            }
        }
        Ok(o)
    }));
    out
}

fn index_fixtures(b: &Budget) -> Vec<Fixture> {
    let mut out = Vec::new();
    for (size, ring) in acceptance_rings() {
        for fx in standard_fixtures(size, ring) {
            let guard = b.guard;
            let key = fx.to_string();
            out.push(fixture(Scope::Indices, key, move || {
                let a = check_fixture(&fx, guard)?;
                let mut o = FixtureOutcome::default();
                o.check(a.agrees(), row([("check", "index-oracle".to_string()), ("formula", a.formula.to_string()), ("enumerated", a.enumerated.to_string()), ("ratio_approx6", approx6(&(rat_from_uint(&a.formula) / rat_from_uint(&a.enumerated.max(1u32.into())))))]));
                Ok(o)
            }));
        }
    }
    out
}
