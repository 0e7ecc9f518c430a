use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use cohomgrowth_core::arith::DEFAULT_GUARD;
use cohomgrowth_core::fixed_vectors::gl2::lemma_level;
use cohomgrowth_core::fixed_vectors::howe::howe_dimension_cap;
use cohomgrowth_core::fixed_vectors::{gl3_uniform_bound, howe_dimension, HoweCase, HoweDatum};
use cohomgrowth_core::groups::{constrained_subgroup_order, double_coset_count, gl_order, parabolic_index};
use cohomgrowth_core::report::document::row;
use cohomgrowth_core::shapes::Exponent;
use cohomgrowth_core::{
    Composition, ExtensionKind, ExtensionModel, Level, PrimePower, ReportDocument, ValuationConstraint,
};

const KINDS: [ExtensionKind; 4] = [
    ExtensionKind::UnramifiedQuadratic,
    ExtensionKind::RamifiedQuadratic,
    ExtensionKind::UnramifiedCubic,
    ExtensionKind::RamifiedCubic,
];

fn ring_case() -> impl Strategy<Value = (u64, usize, u32)> {
    (prop::sample::select(vec![5u64, 7, 11]), 0..KINDS.len(), 1u32..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn norm_is_multiplicative((p, k, level) in ring_case(), x in any::<u64>(), y in any::<u64>()) {
        let ring = ExtensionModel::new(p, KINDS[k]).unwrap().quotient(level);
        let size = ring.size() as u64;
        let (x, y) = (ring.element((x % size) as usize), ring.element((y % size) as usize));
        let m = ring.norm_modulus() as u128;
        let lhs = ring.norm(&ring.mul(&x, &y)) as u128;
        prop_assert_eq!(lhs, ring.norm(&x) as u128 * ring.norm(&y) as u128 % m);
    }

    #[test]
    fn valuation_is_ultrametric((p, k, level) in ring_case(), x in any::<u64>(), y in any::<u64>()) {
        let ring = ExtensionModel::new(p, KINDS[k]).unwrap().quotient(level);
        let size = ring.size() as u64;
        let (x, y) = (ring.element((x % size) as usize), ring.element((y % size) as usize));
        let vs = ring.valuation(&ring.add(&x, &y));
        prop_assert!(vs >= ring.valuation(&x).min(ring.valuation(&y)));
        prop_assert_eq!(ring.valuation(&ring.neg(&x)), ring.valuation(&x));
    }

    #[test]
    fn raising_a_constraint_shrinks_the_group(
        p in prop::sample::select(vec![2u64, 3, 5]),
        n in 1u32..=3,
        grid in prop::collection::vec(0u32..=3, 9),
        cell in 0usize..9,
    ) {
        let pp = PrimePower::new(p, n).unwrap();
        let mut grid = grid;
        for a in 0..3 {
            grid[a * 4] = 0;
        }
        let cell = if cell % 4 == 0 { 1 } else { cell };
        let loose = ValuationConstraint::new(3, grid.clone()).unwrap();
        grid[cell] += 1;
        let tight = ValuationConstraint::new(3, grid).unwrap();
        let (lo, hi) = (
            constrained_subgroup_order(&tight, pp, DEFAULT_GUARD).unwrap(),
            constrained_subgroup_order(&loose, pp, DEFAULT_GUARD).unwrap(),
        );
        prop_assert!(lo <= hi);
        prop_assert!(hi <= gl_order(3, pp));
    }

    #[test]
    fn principal_cosets_times_order_is_gl_order(p in prop::sample::select(vec![2u64, 3, 5, 7]), n in 1u32..=4, k in 1u32..=4, m in 2usize..=3) {
        prop_assume!(k <= n);
        let pp = PrimePower::new(p, n).unwrap();
        let cons = ValuationConstraint::principal(m, k).unwrap();
        let order = constrained_subgroup_order(&cons, pp, DEFAULT_GUARD).unwrap();
        let cosets = double_coset_count(&cons, pp, DEFAULT_GUARD).unwrap();
        prop_assert_eq!(&cosets * &order, gl_order(m, pp));
        // K_k / K_n has order p^{m^2 (n-k)}
        prop_assert_eq!(order, BigUint::from(p).pow(((m * m) as u32) * (n - k)));
    }

    #[test]
    fn parabolic_index_matches_the_constrained_order(
        p in prop::sample::select(vec![2u64, 3, 5]),
        n in 1u32..=3,
        parts in prop::sample::select(vec![vec![1usize, 1], vec![1, 1, 1], vec![2, 1], vec![1, 2]]),
    ) {
        let pp = PrimePower::new(p, n).unwrap();
        let comp = Composition::new(parts).unwrap();
        let m = comp.total();
        let cons = ValuationConstraint::parabolic(&comp, n).unwrap();
        let (q, r) = gl_order(m, pp).div_rem(&constrained_subgroup_order(&cons, pp, DEFAULT_GUARD).unwrap());
        prop_assert!(r.is_zero());
        prop_assert_eq!(parabolic_index(m, &comp, pp).unwrap(), q);
    }

    #[test]
    fn level_round_trips(factors in prop::collection::btree_map(prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]), (1u32..=3, 1u32..=4), 0..4)) {
        let factors: Vec<(u64, u32)> = factors.into_iter().map(|(p, (e, n))| (p.pow(e), n)).collect();
        let level = Level::new(factors.clone()).unwrap();
        let parsed: Level = level.to_string().parse().unwrap();
        prop_assert_eq!(parsed.factors(), factors.as_slice());
    }

    #[test]
    fn report_round_trips(cells in prop::collection::vec(prop::collection::vec(("[a-z]{1,4}", ".{0,12}"), 0..5), 0..6)) {
        let mut doc = ReportDocument::new("prop");
        doc.param("seed", 1);
        for c in cells {
            doc.rows.push(row(c));
        }
        let back = ReportDocument::from_json(&doc.to_json().unwrap()).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(ReportDocument::rows_from_csv(&doc.to_csv().unwrap()).unwrap(), doc.rows.clone());
        let md = doc.to_markdown();
        prop_assert_eq!(md.lines().filter(|l| l.starts_with('|')).count(), if doc.columns().is_empty() { 0 } else { doc.rows.len() + 2 });
    }

    #[test]
    fn howe_dimension_below_cap(q in prop::sample::select(vec![5u64, 7, 9, 11, 25, 27]), j in 1u32..=12, ramified in any::<bool>()) {
        let case = if ramified { HoweCase::Ramified } else { HoweCase::Unramified };
        prop_assume!(!ramified || (j >= 2 && j % 3 != 1));
        let datum = HoweDatum::new(case, j, q).unwrap();
        prop_assert!(howe_dimension(&datum) < howe_dimension_cap(&datum));
    }

    #[test]
    fn uniform_bound_ordering(q in prop::sample::select(vec![5u64, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25]), n in 1u32..=6) {
        let u = gl3_uniform_bound(q, n).unwrap();
        prop_assert!(u.cases_within());
        prop_assert!(u.ordering_holds());
        prop_assert!(u.value > BigRational::zero());
    }

    #[test]
    fn lemma_level_is_n_or_n_minus_one(c in -20i64..40, n in 1u32..20) {
        let l = lemma_level(c, n);
        prop_assert!(l == n || l + 1 == n);
        prop_assert_eq!((c - l as i64).rem_euclid(2), 0);
    }

    #[test]
    fn epsilon_sits_between_integers(x in -50i64..50, y in -50i64..50) {
        prop_assert_eq!(Exponent::with_epsilon(x) <= Exponent::exact(y), x < y);
        prop_assert!(Exponent::with_epsilon(x) != Exponent::exact(y));
    }
}
