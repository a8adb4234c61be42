mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use pmeasure_core::construct::{
    adjoin_unit, build_gadget, check_density, check_irreducibles_realized, check_prime_values, gadget_size,
    level_step, represent_diagram, represent_semilattice, verify_representation, verify_run, ConstructError,
    ConstructOptions, ConstructionRun,
};
use pmeasure_core::amalgam::MeasuredDiagram;
use pmeasure_core::diagram::{IndexSemilattice, SemilatticeDiagram};
use pmeasure_core::element::{Element, GadgetPoint};
use pmeasure_core::lab::distributive_lattices_up_to_iso;
use pmeasure_core::measure::{check_p1, check_p2, check_p3, P2Mode, PMeasuredPoset};
use pmeasure_core::order::FinitePoset;
use pmeasure_core::semilattice::{FiniteJoinSemilattice, Homomorphism};
use proptest::prelude::*;
use rand::Rng;

fn opts() -> ConstructOptions {
    ConstructOptions { budget: 4_000, ..ConstructOptions::default() }
}

fn two_chain_with(s: &Arc<FiniteJoinSemilattice>, value: &str) -> PMeasuredPoset {
    let mut m = PMeasuredPoset::zero(FinitePoset::chain(&["0", "1"]), s.clone());
    m.set(1, 0, s.index_of_name(value).unwrap());
    m
}

fn report_failures(run: &ConstructionRun) -> Vec<String> {
    verify_run(run).failures().map(|e| format!("{}/{}: {:?}", e.scope, e.name, e.detail)).collect()
}

#[test]
fn gadget_sizes() {
    let sizes: Vec<Option<usize>> = (0..5).map(gadget_size).collect();
    assert_eq!(sizes, vec![Some(1), Some(1), Some(5), Some(13), Some(29)]);
    assert_eq!(gadget_size(200), None);
}

#[test]
fn zero_interval_gets_a_filler() {
    let s = Arc::new(FiniteJoinSemilattice::chain(&["0", "1"]));
    let m = two_chain_with(&s, "0");
    let g = build_gadget(&m, 0, 1, 0, "d").unwrap();
    assert!(g.is_filler());
    assert_eq!(g.len(), 1);
    let Element::Gadget(tag) = g.elements.element(0) else { panic!("expected a gadget point") };
    assert_eq!(tag.point, GadgetPoint::Filler);
    assert_eq!(g.closure.validate(), Ok(()));
}

#[test]
fn one_irreducible_gives_one_point() {
    let s = Arc::new(FiniteJoinSemilattice::chain(&["0", "1"]));
    let g = build_gadget(&two_chain_with(&s, "1"), 0, 1, 0, "d").unwrap();
    assert_eq!(g.len(), 1);
    assert!(!g.is_filler());
    // the single point doubles the step: full value on both sides
    let c = &g.closure;
    assert_eq!((c.value(1, 0), c.value(2, 1), c.value(2, 0)), (1, 1, 1));
}

#[test]
fn two_irreducibles_give_five_points() {
    let s = Arc::new(FiniteJoinSemilattice::powerset(&["a", "b"]));
    let g = build_gadget(&two_chain_with(&s, "{a,b}"), 0, 1, 0, "d").unwrap();
    assert_eq!(g.len(), 5);
    assert_eq!(g.one_set.len(), 2);
    let c = &g.closure;
    assert_eq!(c.validate(), Ok(()));
    assert_eq!(check_p1(c), Ok(()));
    assert_eq!(check_p2(c, P2Mode::All), Ok(()));
    let find = |p: GadgetPoint| {
        (0..c.len())
            .find(|&i| matches!(c.poset.element(i), Element::Gadget(t) if t.point == p))
            .unwrap()
    };
    let la = find(GadgetPoint::LowerCopy(vec!["{a}".into()]));
    let lb = find(GadgetPoint::LowerCopy(vec!["{b}".into()]));
    let mid = find(GadgetPoint::LowerCopy(vec!["{a}".into(), "{b}".into()]));
    let ua = find(GadgetPoint::UpperCopy(vec!["{a}".into()]));
    assert_eq!(s.name(c.value(la, lb)), "{a}");
    assert_eq!(s.name(c.value(mid, 0)), "{a,b}");
    assert!(c.poset.lt(mid, ua));
    assert_eq!(s.name(c.value(ua, mid)), "{a}");
    assert_eq!(s.name(c.value(c.len() - 1, ua)), "{b}");
}

#[test]
fn gadgets_over_every_value_are_separating_and_splitting() {
    for k in 1..=3 {
        let s = Arc::new(common::powerset_of(k));
        for v in 0..s.len() {
            let mut m = PMeasuredPoset::zero(FinitePoset::chain(&["0", "1"]), s.clone());
            m.set(1, 0, v);
            let g = build_gadget(&m, 0, 1, 0, "d").unwrap();
            let bits = s.irreducibles().iter().filter(|&&j| s.le(j, v)).count();
            assert_eq!(Some(g.len()), gadget_size(bits));
            assert_eq!(g.closure.validate(), Ok(()));
            assert_eq!(g.closure.value(g.closure.len() - 1, 0), v);
            if v != s.zero() {
                assert_eq!(check_p1(&g.closure), Ok(()));
                assert_eq!(check_p2(&g.closure, P2Mode::All), Ok(()));
                assert_eq!(check_prime_values(&g.closure, true), Ok(()));
            }
        }
    }
}

#[test]
fn gadget_needs_a_cover() {
    let s = Arc::new(FiniteJoinSemilattice::chain(&["0", "1"]));
    let m = PMeasuredPoset::zero(FinitePoset::chain(&["0", "m", "1"]), s);
    assert!(matches!(build_gadget(&m, 0, 2, 0, "d"), Err(ConstructError::NotCover(..))));
}

#[test]
fn first_level_is_the_two_chain() {
    let d = SemilatticeDiagram::single("0", FiniteJoinSemilattice::chain(&["0", "1"]));
    let md = MeasuredDiagram::new(d);
    let (out, next) = level_step(&md, 0, opts()).unwrap();
    assert!(out.amalgam.is_none() && out.gadgets.is_empty());
    assert_eq!(out.block.len(), 2);
    assert_eq!(next.blocks.len(), 1);
}

#[test]
fn powerset_of_two_gives_seven_points() {
    let s = FiniteJoinSemilattice::powerset(&["a", "b"]);
    let rep = represent_semilattice(&s, opts()).unwrap();
    assert_eq!(rep.measured.len(), 7);
    assert!(!rep.adjoined_unit);
    assert_eq!(check_p3(&rep.measured), Ok(()));
    assert!(verify_representation(&rep).all_ok());
    assert!(report_failures(&rep.run).is_empty(), "{:?}", report_failures(&rep.run));
}

#[test]
fn three_chain_gives_seven_points() {
    let s = FiniteJoinSemilattice::chain(&["0", "s", "1"]);
    let rep = represent_semilattice(&s, opts()).unwrap();
    assert_eq!(rep.measured.len(), 7);
    assert!(verify_representation(&rep).all_ok());
}

#[test]
fn trivial_and_two_element_semilattices() {
    let one = FiniteJoinSemilattice::chain(&["0"]);
    let rep = represent_semilattice(&one, opts()).unwrap();
    assert_eq!(rep.measured.len(), 1);
    assert!(verify_representation(&rep).all_ok());
    let two = FiniteJoinSemilattice::chain(&["0", "1"]);
    let rep = represent_semilattice(&two, opts()).unwrap();
    assert_eq!(rep.measured.len(), 2);
    assert!(verify_representation(&rep).all_ok());
}

#[test]
fn semilattice_without_unit_is_cut_back() {
    let s = FiniteJoinSemilattice::from_sets(&[0, 1, 2, 3, 7]).unwrap().without_unit();
    let rep = represent_semilattice(&s, opts()).unwrap();
    assert!(rep.adjoined_unit);
    assert_eq!(rep.measured.len(), 8);
    assert!(verify_representation(&rep).all_ok());
    assert!(rep.measured.mu.iter().all(|&v| v < s.len()));
}

#[test]
fn adjoined_unit_keeps_old_indices() {
    let s = FiniteJoinSemilattice::powerset(&["a"]);
    let t = adjoin_unit(&s);
    assert_eq!(t.len(), 3);
    for i in 0..s.len() {
        assert_eq!(t.element(i), s.element(i));
    }
    assert_eq!(t.top(), 2);
}

#[test]
fn square_diagram_levels() {
    let run = represent_diagram(&common::square_diagram(), opts()).unwrap();
    assert!(!run.added_bottom);
    let sizes: BTreeMap<String, usize> = run.stats.iter().map(|s| (s.level.clone(), s.block_size)).collect();
    let expected: BTreeMap<String, usize> =
        [("e", 2), ("a", 3), ("b", 3), ("ab", 24)].iter().map(|&(k, v)| (k.to_string(), v)).collect();
    assert_eq!(sizes, expected);
    assert!(report_failures(&run).is_empty(), "{:?}", report_failures(&run));
    let ab = run.index_of("ab").unwrap();
    assert_eq!(check_density(&run.output, ab), Ok(()));
    assert_eq!(check_irreducibles_realized(run.block(ab)), Ok(()));
    assert!(verify_run(&run).get("ab", "p1").is_some_and(|e| e.ok));
}

#[test]
fn bottom_is_prepended_when_needed() {
    let d = SemilatticeDiagram::single("x", FiniteJoinSemilattice::powerset(&["a", "b"]));
    let run = represent_diagram(&d, opts()).unwrap();
    assert!(run.added_bottom);
    assert_eq!(run.diagram.index.len(), 2);
    assert!(run.index_of("bottom").is_some());
    assert!(report_failures(&run).is_empty());
}

#[test]
fn budget_is_enforced() {
    let s = FiniteJoinSemilattice::powerset(&["a", "b", "c"]);
    let small = ConstructOptions { budget: 10, ..opts() };
    match represent_semilattice(&s, small) {
        Err(ConstructError::BudgetExceeded { needed, budget, .. }) => assert!(needed > budget && budget == 10),
        other => panic!("expected a budget error, got {other:?}"),
    }
}

#[test]
fn gadget_order_does_not_matter() {
    for d in [common::square_diagram(), SemilatticeDiagram::two_chain(FiniteJoinSemilattice::powerset(&["a", "b"]))] {
        let fwd = represent_diagram(&d, opts()).unwrap();
        let rev = represent_diagram(&d, ConstructOptions { reverse_gadget_order: true, ..opts() }).unwrap();
        assert_eq!(fwd.output.blocks, rev.output.blocks);
    }
}

#[test]
fn bad_inputs_are_rejected() {
    let m3 = FinitePoset::from_pairs(common::names("m", 5), &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).unwrap();
    let m3 = FiniteJoinSemilattice::from_poset(m3).unwrap();
    assert!(matches!(represent_semilattice(&m3, opts()), Err(ConstructError::NotDistributive { .. })));

    let idx = IndexSemilattice::chain(&["lo", "hi"]);
    let two = FiniteJoinSemilattice::chain(&["0", "1"]);
    let ab = FiniteJoinSemilattice::powerset(&["a", "b"]);
    let a = ab.index_of_name("{a}").unwrap();
    let mut t = BTreeMap::new();
    t.insert((0, 1), Homomorphism { map: vec![ab.zero(), a], preserves_unit: false });
    let d = SemilatticeDiagram::new(idx, vec![two, ab], t).unwrap();
    assert!(matches!(represent_diagram(&d, opts()), Err(ConstructError::NotUnital(..))));
}

#[test]
fn every_small_distributive_lattice_is_represented() {
    for n in 1..=5 {
        for s in distributive_lattices_up_to_iso(n) {
            let rep = represent_semilattice(&s, ConstructOptions::default()).unwrap();
            let r = verify_representation(&rep);
            assert!(r.all_ok(), "{:?}", r.failures().collect::<Vec<_>>());
        }
    }
}

#[test]
fn maps_that_kill_atoms_produce_fillers() {
    let mut fillers = 0;
    for seed in 0..40 {
        let mut r = common::rng(seed);
        let d = common::random_chain_diagram(&mut r, &[1, 2, 2]);
        let run = represent_diagram(&d, opts()).unwrap();
        fillers += run.stats.iter().map(|s| s.fillers).sum::<usize>();
        assert!(report_failures(&run).is_empty(), "seed {seed}: {:?}", report_failures(&run));
    }
    assert!(fillers > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_chain_diagrams_verify(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let len = r.gen_range(1..=3);
        let sizes: Vec<usize> = (0..len).map(|_| r.gen_range(1..=2)).collect();
        let d = common::random_chain_diagram(&mut r, &sizes);
        let run = represent_diagram(&d, opts()).unwrap();
        prop_assert!(report_failures(&run).is_empty(), "{:?}", report_failures(&run));
    }

    #[test]
    fn random_square_diagrams_verify(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let (ka, kb, kab) = (r.gen_range(1..=2), r.gen_range(1..=2), r.gen_range(1..=2));
        let d = common::random_square_diagram(&mut r, ka, kb, kab);
        let run = represent_diagram(&d, opts()).unwrap();
        prop_assert!(report_failures(&run).is_empty(), "{:?}", report_failures(&run));
    }
}
