//! Acceptance gate: nine criteria, each run sequentially under its own time
//! limit, one `PASS`/`FAIL` line apiece. Exits nonzero if any criterion fails.
//!
//! Expected values are rebuilt here from closed forms or enumeration rather
//! than read back from the library.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::{BigRational, Rational64};

use cohomgrowth_core::arith::DEFAULT_GUARD;
use cohomgrowth_core::cohomology::{parameter_exponents, multiplicity_exponent, verify_hodge_lefschetz, CohRep};
use cohomgrowth_core::fixed_vectors::gl3::{admissible_conductors, cell_bound};
use cohomgrowth_core::fixed_vectors::{
    gl3_uniform_bound, klambda_constraint, lambda_candidates, ramified_orbits, supercuspidal_bound, unramified_orbits,
    verify_double_coset_lemmas, HoweCase, HoweDatum, MaximalCompact,
};
use cohomgrowth_core::groups::agreement::{acceptance_rings, standard_fixtures, verify_index_oracles};
use cohomgrowth_core::groups::double_coset_count;
use cohomgrowth_core::groups::enumerate::coset_count;
use cohomgrowth_core::report::{volume_comparison, theorem_bound};
use cohomgrowth_core::shapes::{verify_comb_lemma, DesignatedShape, Exponent, Pair, Shape};
use cohomgrowth_core::{Level, PrimePower};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rat(num: u128, den: u128) -> BigRational {
    BigRational::new(BigUint::from(num).into(), BigUint::from(den).into())
}

fn pow(p: u64, e: u32) -> u128 {
    (p as u128).pow(e)
}

fn designated(pairs: &[(u32, u32)], first: (u32, u32)) -> String {
    let shape = Shape::from_tuples(pairs).unwrap();
    DesignatedShape::new(shape, Pair { n: first.0, m: first.1 }).unwrap().to_string()
}

fn comb_lemma() -> Outcome {
    let report = verify_comb_lemma(12).map_err(err)?;
    ensure(report.violations.is_empty(), || format!("violations: {:?}", report.violations))?;
    let seen: BTreeSet<(u32, u32, String)> =
        report.witnesses.iter().map(|w| (w.rank, w.degree, w.shape.clone())).collect();
    let mut expected = BTreeSet::new();
    for n in 2..=12u32 {
        for d in 0..n - 1 {
            let lead = (n - d, 1);
            let pairs = if d == 0 { vec![lead] } else { vec![lead, (1, d)] };
            expected.insert((n, d, designated(&pairs, lead)));
        }
    }
    expected.insert((4, 2, designated(&[(2, 2)], (2, 2))));
    ensure(seen == expected, || {
        format!("witnesses differ: extra {:?}, missing {:?}", seen.difference(&expected), expected.difference(&seen))
    })?;
    Ok(format!("{} designations, {} equality witnesses", report.checked, seen.len()))
}

fn headline() -> Outcome {
    let mut count = 0;
    for n in 2..=12u32 {
        for d in 0..n - 1 {
            let r = theorem_bound(n, d, &Level::trivial()).map_err(err)?;
            ensure(r.headline == Exponent::exact((n * d + 1) as i64), || format!("N={n} d={d}: {}", r.headline))?;
            ensure(r.exceptional_factor() == ((n, d) == (4, 2)), || format!("N={n} d={d}: factor {}", r.factor_exponent))?;
            count += 1;
        }
    }
    let r = theorem_bound(4, 2, &"5".parse().map_err(err)?).map_err(err)?;
    // 5^9 (1 + 1/5)
    ensure(r.value == rat(pow(5, 9) * 6, 5), || format!("(4,2) at level 5: {}", r.value))?;
    Ok(format!("{count} (N,d) pairs, (1+1/q) only at (4,2)"))
}

fn gl2_orbits() -> Outcome {
    let limit = pow(7, 6);
    let mut checks = 0;
    for p in [3u64, 5, 7] {
        let mut a = 1;
        while pow(p, 2 * a) <= limit {
            let c = unramified_orbits(p, a, DEFAULT_GUARD).map_err(err)?;
            ensure(c.brute_force == pow(p, a), || format!("unramified p={p} a={a}: {}", c.brute_force))?;
            checks += 1;
            a += 1;
        }
        let mut n = 1;
        while pow(p, 2 * n - 1) <= limit {
            let pair = ramified_orbits(p, n, DEFAULT_GUARD).map_err(err)?;
            ensure(pair[0].param != pair[1].param, || format!("p={p}: one extension class"))?;
            for c in pair {
                let want = (pow(p, n) + pow(p, n - 1)) / 2;
                ensure(c.ring_size <= limit, || format!("ring {} too large", c.ring_size))?;
                ensure(c.brute_force == want, || format!("ramified p={p} n={n} {:?}: {}", c.param, c.brute_force))?;
                checks += 1;
            }
            n += 1;
        }
    }
    Ok(format!("{checks} orbit counts"))
}

fn supercuspidal_components() -> Outcome {
    for p in [3u64, 5, 7] {
        for n in 1..=4 {
            let b = supercuspidal_bound(p, n).map_err(err)?;
            let cap = BigUint::from(pow(p, n) + pow(p, n - 1));
            ensure(b.unramified_sum() <= cap && b.ramified_sum() <= cap, || format!("p={p} n={n}"))?;
            ensure(b.components_within(), || format!("p={p} n={n}: library disagrees"))?;
        }
    }
    Ok("p in {3,5,7}, n <= 4".into())
}

fn index_oracles() -> Outcome {
    let fixtures: Vec<_> = acceptance_rings().into_iter().flat_map(|(m, r)| standard_fixtures(m, r)).collect();
    let report = verify_index_oracles(&fixtures, DEFAULT_GUARD).map_err(err)?;
    ensure(report.skipped.is_empty(), || format!("skipped: {:?}", report.skipped))?;
    ensure(report.disagreements().is_empty(), || format!("{:?}", report.disagreements()))?;
    // K_lambda images at p = 2, where the cubic models are not needed
    let mut klambda = 0;
    for n in 1..=2u32 {
        let pp = PrimePower::new(2, n).map_err(err)?;
        for j in admissible_conductors(HoweCase::Unramified, n) {
            let datum = HoweDatum::new(HoweCase::Unramified, j, 2).map_err(err)?;
            for lambda in lambda_candidates(&datum, n).map_err(err)? {
                for variant in [MaximalCompact::Hyperspecial, MaximalCompact::Iwahori] {
                    let cons = klambda_constraint(&lambda, variant, n).map_err(err)?;
                    let formula = double_coset_count(&cons, pp, DEFAULT_GUARD).map_err(err)?;
                    let brute = coset_count(&cons, pp, DEFAULT_GUARD).map_err(err)?;
                    ensure(formula == BigUint::from(brute), || format!("{lambda} {variant:?} n={n}: {formula} vs {brute}"))?;
                    klambda += 1;
                }
            }
        }
    }
    Ok(format!("{} fixtures agree, {klambda} K_lambda cosets", report.checks.len()))
}

fn double_cosets() -> Outcome {
    let mut rows = 0;
    for q in [5u64, 7] {
        for n in 1..=2u32 {
            let r = verify_double_coset_lemmas(q, n, DEFAULT_GUARD).map_err(err)?;
            ensure(r.in_scope, || format!("q={q} out of scope"))?;
            ensure(r.violations().is_empty(), || format!("q={q} n={n}: {:?}", r.violations()))?;
            for &(case, j, k, _) in &r.candidate_counts {
                let cap = match case {
                    HoweCase::Unramified => n * n,
                    HoweCase::Ramified => 9 * n * n,
                };
                ensure(k as u32 <= cap, || format!("q={q} n={n} {case} j={j}: {k} candidates"))?;
            }
            if n == 2 {
                ensure(r.rows.iter().any(|x| x.case == HoweCase::Ramified), || "no ramified rows".into())?;
            }
            rows += r.rows.len();
        }
    }
    // counts at n = 1 against enumeration of GL_3(F_5)
    let pp = PrimePower::new(5, 1).map_err(err)?;
    let datum = HoweDatum::new(HoweCase::Unramified, 1, 5).map_err(err)?;
    for lambda in lambda_candidates(&datum, 1).map_err(err)? {
        let cons = klambda_constraint(&lambda, MaximalCompact::Hyperspecial, 1).map_err(err)?;
        let brute = coset_count(&cons, pp, DEFAULT_GUARD).map_err(err)?;
        let bound = cell_bound(&datum, 1);
        ensure(rat(brute as u128, 1) <= bound, || format!("{lambda}: {brute} > {bound}"))?;
    }
    Ok(format!("{rows} (case, j, lambda) rows within their bounds"))
}

fn uniform_bound() -> Outcome {
    for q in [5u64, 7, 11, 13] {
        for n in 1..=4u32 {
            let u = gl3_uniform_bound(q, n).map_err(err)?;
            // 9 n^2 q^{4n} (q+1)^3 / q^3
            let want = rat(9 * (n as u128).pow(2) * pow(q, 4 * n) * (q as u128 + 1).pow(3), pow(q, 3));
            ensure(u.value == want, || format!("q={q} n={n}: {}", u.value))?;
            for (case, b) in &u.cases {
                ensure(*b <= want, || format!("q={q} n={n} {case}: {b}"))?;
            }
            ensure(u.assembled_max <= want, || format!("q={q} n={n}: assembled"))?;
            ensure(rat(pow(q, 3 * n), 1) <= want && want <= rat(pow(q, 8 * n), 1), || format!("q={q} n={n}: ordering"))?;
            ensure(u.ordering_holds(), || format!("q={q} n={n}: library ordering"))?;
        }
    }
    Ok("q in {5,7,11,13}, n <= 4".into())
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn hodge() -> Outcome {
    for n in 2..=12u32 {
        let r = verify_hodge_lefschetz(n).map_err(err)?;
        ensure(r.passed(), || format!("N={n}: {:?}", r.failures))?;
        let m = (n - 1) as u128;
        for d in 0..=2 * m {
            let split: u128 = (0..=d.min(m)).filter(|&a| d - a <= m).map(|a| binomial(m, a) * binomial(m, d - a)).sum();
            ensure(split == binomial(2 * m, d), || format!("N={n} d={d}"))?;
        }
        for rep in CohRep::all(n) {
            let d = rep.degree();
            ensure(multiplicity_exponent(&rep) == Rational64::new(d as i64, n as i64 - 1), || format!("{rep}: 2/p"))?;
            if d + 1 < n {
                let len = parameter_exponents(&rep).map_err(err)?.characters.len();
                ensure(len == n as usize, || format!("{rep}: {len} characters"))?;
            }
        }
    }
    Ok("N <= 12".into())
}

fn below_volume_prediction() -> Outcome {
    for n in 3..=12u32 {
        for d in 1..n - 1 {
            let (ours, predicted) = volume_comparison(n, d).map_err(err)?;
            let (n, d) = (n as i64, d as i64);
            ensure(ours == Rational64::new(n * d, n * n - 1) && predicted == Rational64::new(d, n - 1), || {
                format!("N={n} d={d}: {ours}, {predicted}")
            })?;
            // Nd (N-1) < d (N^2-1) iff N < N + 1
            ensure(n * d * (n - 1) < d * (n * n - 1), || format!("N={n} d={d}"))?;
        }
    }
    let (three_eighths, _) = volume_comparison(3, 1).map_err(err)?;
    ensure(three_eighths == Rational64::new(3, 8), || format!("{three_eighths}"))?;
    ensure(three_eighths < Rational64::new(7, 12), || "3/8 vs 7/12".into())?;
    Ok("N <= 12; 3/8 < 7/12".into())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "comb lemma, N <= 12", limit: Duration::from_secs(10), run: comb_lemma },
        Criterion { id: 2, name: "headline exponent Nd+1", limit: Duration::from_secs(5), run: headline },
        Criterion { id: 3, name: "GL2 norm-one orbit counts", limit: Duration::from_secs(60), run: gl2_orbits },
        Criterion { id: 4, name: "supercuspidal components", limit: Duration::from_secs(1), run: supercuspidal_components },
        Criterion { id: 5, name: "index oracle agreement", limit: Duration::from_secs(300), run: index_oracles },
        Criterion { id: 6, name: "GL3 double coset bounds", limit: Duration::from_secs(60), run: double_cosets },
        Criterion { id: 7, name: "GL3 uniform bound", limit: Duration::from_secs(1), run: uniform_bound },
        Criterion { id: 8, name: "Hodge and Weyl identities", limit: Duration::from_secs(1), run: hodge },
        Criterion { id: 9, name: "exponent below the volume prediction", limit: Duration::from_secs(1), run: below_volume_prediction },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.id.to_string() == *f) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; over the time limit")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {} {}: {} ({:.2}s of {}s) {}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            detail
        );
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
