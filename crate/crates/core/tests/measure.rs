mod common;

use std::sync::Arc;

use pmeasure_core::lab::{enumerate_pmeasures, Constraints};
use pmeasure_core::measure::{
    check_doubling, check_extension, check_p1, check_p2, check_p3, check_sandwich,
    extend_measure_to_interval_extension, values_generate, DoublingError, ExtendError, MeasureViolation, P2Mode,
    P3Failure, PMeasuredPoset,
};
use pmeasure_core::extension::analyze_extension;
use pmeasure_core::order::FinitePoset;
use pmeasure_core::semilattice::{FiniteJoinSemilattice, Homomorphism};
use proptest::prelude::*;
use rand::Rng;

fn measured(p: FinitePoset, s: &Arc<FiniteJoinSemilattice>, table: &[(usize, usize, &str)]) -> PMeasuredPoset {
    let mut m = PMeasuredPoset::zero(p, s.clone());
    for &(x, y, v) in table {
        m.set(x, y, s.index_of_name(v).unwrap());
    }
    m
}

#[test]
fn validate_catches_vanishing_and_triangle() {
    let s = Arc::new(FiniteJoinSemilattice::chain(&["0", "1"]));
    let p = FinitePoset::chain(&["a", "b", "c"]);
    let mut m = measured(p, &s, &[(2, 0, "1"), (1, 0, "1"), (2, 1, "1")]);
    assert_eq!(m.validate(), Ok(()));
    m.set(0, 1, 1);
    assert_eq!(m.validate(), Err(MeasureViolation::Vanishing(0, 1)));
    m.set(0, 1, 0);
    m.set(1, 0, 0);
    m.set(2, 1, 0);
    assert!(matches!(m.validate(), Err(MeasureViolation::Triangle(..))));
}

#[test]
fn incomparable_distance_is_an_error() {
    let s = Arc::new(FiniteJoinSemilattice::chain(&["0", "1"]));
    let m = PMeasuredPoset::zero(FinitePoset::antichain(&["a", "b"]), s);
    assert!(m.distance(0, 1).is_err());
    assert_eq!(m.distance(0, 0), Ok(0));
}

#[test]
fn three_chain_into_powerset() {
    // 0 < m < 1 with steps {a} then {b}
    let s = Arc::new(FiniteJoinSemilattice::powerset(&["a", "b"]));
    let p = FinitePoset::chain(&["0", "m", "1"]);
    let m = measured(p, &s, &[(1, 0, "{a}"), (2, 1, "{b}"), (2, 0, "{a,b}")]);
    assert_eq!(m.validate(), Ok(()));
    assert_eq!(check_p1(&m), Ok(()));
    assert_eq!(check_p2(&m, P2Mode::All), Ok(()));
    assert_eq!(check_p2(&m, P2Mode::Bounded), Ok(()));
    // values at the bottom are {a} and {a,b}; {b} only appears higher up
    assert_eq!(check_p3(&m), Err(P3Failure::NotGenerating(s.index_of_name("{b}").unwrap())));
    assert!(values_generate(&m));
}

#[test]
fn a_zero_step_breaks_separation() {
    let s = Arc::new(FiniteJoinSemilattice::chain(&["0", "1"]));
    let m = measured(FinitePoset::chain(&["0", "m", "1"]), &s, &[(2, 0, "1"), (2, 1, "1")]);
    assert_eq!(m.validate(), Ok(()));
    assert_eq!(check_p1(&m), Err((0, 1)));
}

#[test]
fn a_two_element_chain_cannot_split_a_join() {
    // a single step valued a v b cannot be walked in steps below a or b
    let s = Arc::new(FiniteJoinSemilattice::powerset(&["a", "b"]));
    let m = measured(FinitePoset::chain(&["0", "1"]), &s, &[(1, 0, "{a,b}")]);
    assert_eq!(check_p1(&m), Ok(()));
    assert!(check_p2(&m, P2Mode::All).is_err());
    assert!(check_p2(&m, P2Mode::Bounded).is_err());
    assert_eq!(check_p3(&m), Err(P3Failure::NotGenerating(s.index_of_name("{a}").unwrap())));
}

#[test]
fn p3_needs_a_least_element() {
    let s = Arc::new(FiniteJoinSemilattice::chain(&["0", "1"]));
    let m = PMeasuredPoset::zero(FinitePoset::antichain(&["a", "b"]), s);
    assert_eq!(check_p3(&m), Err(P3Failure::NoLeast));
}

#[test]
fn check_extension_reports_the_bad_pair() {
    let two = Arc::new(FiniteJoinSemilattice::chain(&["0", "1"]));
    let ab = Arc::new(FiniteJoinSemilattice::powerset(&["a", "b"]));
    let sub = measured(FinitePoset::chain(&["0", "1"]), &two, &[(1, 0, "1")]);
    let sup = measured(FinitePoset::chain(&["0", "m", "1"]), &ab, &[(1, 0, "{a}"), (2, 1, "{b}"), (2, 0, "{a,b}")]);
    let unit = Homomorphism { map: vec![ab.zero(), ab.top()], preserves_unit: true };
    assert_eq!(check_extension(&sub, &sup, &unit), Ok(()));
    let a = ab.index_of_name("{a}").unwrap();
    let wrong = Homomorphism { map: vec![ab.zero(), a], preserves_unit: false };
    assert!(check_extension(&sub, &sup, &wrong).is_err());
}

#[test]
fn doubling_on_a_chain_and_its_failure() {
    let ab = Arc::new(FiniteJoinSemilattice::powerset(&["a", "b"]));
    let p = FinitePoset::chain(&["0", "1"]);
    let q = FinitePoset::chain(&["0", "m", "1"]);
    let w = analyze_extension(&p, &q).unwrap();
    // steps {a}, {a,b}: comparable, doubled
    let good = measured(q.clone(), &ab, &[(1, 0, "{a}"), (2, 1, "{a,b}"), (2, 0, "{a,b}")]);
    assert_eq!(check_doubling(&good, &w), Ok(()));
    // steps {a}, {b}: incomparable
    let bad = measured(q, &ab, &[(1, 0, "{a}"), (2, 1, "{b}"), (2, 0, "{a,b}")]);
    assert_eq!(check_doubling(&bad, &w), Err(DoublingError::NotDoubled(1)));
}

#[test]
fn extension_rejects_non_distributive_targets() {
    let mut r = common::rng(7);
    let targets = common::small_distributive_lattices(3);
    let mut f = common::random_family(&mut r, &targets);
    let m3 = FinitePoset::from_pairs(common::names("m", 5), &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).unwrap();
    let m3 = Arc::new(FiniteJoinSemilattice::from_poset(m3).unwrap());
    f.base = PMeasuredPoset::zero(f.base.poset.clone(), m3);
    assert_eq!(extend_measure_to_interval_extension(&f).unwrap_err(), ExtendError::TargetNotDistributive);
}

fn check_family(seed: u64) -> Result<(), TestCaseError> {
    let mut r = common::rng(seed);
    let targets = common::small_distributive_lattices(5);
    let f = common::random_family(&mut r, &targets);
    let m = extend_measure_to_interval_extension(&f).unwrap();
    prop_assert_eq!(m.validate(), Ok(()));
    let id = Homomorphism::identity(m.target.len());
    prop_assert_eq!(check_extension(&f.base, &m, &id), Ok(()));
    for blk in f.blocks.values() {
        prop_assert_eq!(check_extension(blk, &m, &id), Ok(()));
    }
    prop_assert_eq!(check_sandwich(&m, &f.witness), Ok(()));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn extensions_of_random_families_are_valid(seed in any::<u64>()) {
        check_family(seed)?;
    }

    #[test]
    fn random_measures_satisfy_the_sandwich_on_interval_sums(seed in any::<u64>()) {
        // any measure on an interval extension satisfies the pointwise bounds
        let mut r = common::rng(seed);
        let targets = common::small_distributive_lattices(5);
        let f = common::random_family(&mut r, &targets);
        let s = targets[r.gen_range(0..targets.len())].clone();
        let m = common::random_pmeasure(&mut r, &f.sup, &s);
        prop_assert_eq!(m.validate(), Ok(()));
        prop_assert_eq!(check_sandwich(&m, &f.witness), Ok(()));
    }

    #[test]
    fn bounded_p2_agrees_with_full_p2(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let targets = common::small_distributive_lattices(5);
        let s = targets[r.gen_range(0..targets.len())].clone();
        let n = r.gen_range(1..=5);
        let p = common::random_poset(&mut r, "v", n, 0.5);
        let m = common::random_pmeasure(&mut r, &p, &s);
        prop_assert_eq!(check_p2(&m, P2Mode::All).is_ok(), check_p2(&m, P2Mode::Bounded).is_ok());
    }
}

/// Brute force: every measure the enumerator finds on small posets passes
/// validation, and the count on a 2-chain matches the target size.
#[test]
fn enumerator_agrees_with_validation() {
    let mut r = common::rng(11);
    for s in common::small_distributive_lattices(4) {
        let chain = FinitePoset::chain(&["0", "1"]);
        let count = enumerate_pmeasures(&chain, s.clone(), &Constraints::default(), 1 << 20, |m| {
            assert_eq!(m.validate(), Ok(()));
            true
        })
        .unwrap();
        assert_eq!(count, s.len());
        for _ in 0..5 {
            let n = r.gen_range(1..=4);
            let p = common::random_poset(&mut r, "v", n, 0.5);
            enumerate_pmeasures(&p, s.clone(), &Constraints::default(), 1 << 22, |m| {
                assert_eq!(m.validate(), Ok(()));
                true
            })
            .unwrap();
        }
    }
}

/// The extension is found by the brute-force search among all measures on
/// the larger poset that restrict correctly.
#[test]
fn extension_is_among_enumerated_candidates() {
    let mut r = common::rng(3);
    let targets = common::small_distributive_lattices(3);
    let mut checked = 0;
    while checked < 20 {
        let f = common::random_family(&mut r, &targets);
        if f.sup.len() > 6 {
            continue;
        }
        let m = extend_measure_to_interval_extension(&f).unwrap();
        let id = Homomorphism::identity(m.target.len());
        let mut c = Some(Constraints::default());
        for sub in std::iter::once(&f.base).chain(f.blocks.values()) {
            c = c.unwrap().extending(&f.sup, sub, &id).unwrap();
        }
        let c = c.expect("base and blocks agree");
        let mut found = false;
        enumerate_pmeasures(&f.sup, m.target.clone(), &c, 1 << 24, |cand| {
            found |= cand == &m;
            !found
        })
        .unwrap();
        assert!(found);
        checked += 1;
    }
}
