mod common;

use pmeasure_core::element::Element;
use pmeasure_core::lab::{lattices_up_to_iso, posets_up_to_iso};
use pmeasure_core::order::{FinitePoset, OrderError};
use pmeasure_core::semilattice::{FiniteJoinSemilattice, Homomorphism, HomomorphismError};
use proptest::prelude::*;

fn m3() -> FiniteJoinSemilattice {
    let p = FinitePoset::from_pairs(
        common::names("m", 5),
        &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)],
    )
    .unwrap();
    FiniteJoinSemilattice::from_poset(p).unwrap()
}

fn n5() -> FiniteJoinSemilattice {
    // 0 < a < b < 1, 0 < c < 1
    let p = FinitePoset::from_pairs(common::names("n", 5), &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]).unwrap();
    FiniteJoinSemilattice::from_poset(p).unwrap()
}

#[test]
fn rejects_non_orders() {
    let e = common::names("x", 2);
    assert!(matches!(FinitePoset::new(e.clone(), &[true, true, true, true]), Err(OrderError::Antisymmetry(..))));
    assert!(matches!(FinitePoset::new(e.clone(), &[false, false, false, true]), Err(OrderError::Reflexivity(..))));
    let e3 = common::names("x", 3);
    let not_transitive = [true, true, false, false, true, true, false, false, true];
    assert!(matches!(FinitePoset::new(e3, &not_transitive), Err(OrderError::Transitivity(..))));
    assert!(matches!(
        FinitePoset::new(vec![Element::base("a"), Element::base("a")], &[true, false, false, true]),
        Err(OrderError::DuplicateElement(..))
    ));
}

#[test]
fn chain_covers_and_intervals() {
    let c = FinitePoset::chain(&["0", "1", "2", "3"]);
    assert!(c.covers(0, 1) && !c.covers(0, 2));
    assert_eq!(c.interval(1, 3), vec![1, 2, 3]);
    assert_eq!(c.heights(), vec![0, 1, 2, 3]);
    assert_eq!(c.least(), Some(0));
    assert_eq!(c.greatest(), Some(3));
    assert_eq!(c.cover_pairs(), vec![(0, 1), (1, 2), (2, 3)]);
}

#[test]
fn antichain_has_no_joins() {
    let a = FinitePoset::antichain(&["a", "b"]);
    assert_eq!(a.join(0, 1), None);
    assert!(!a.is_lattice());
    assert!(!a.bounded_subsets_have_joins());
}

#[test]
fn m3_is_not_distributive_and_n5_neither() {
    let m = m3();
    let (a, b, c) = m.distributivity_witness().unwrap();
    assert!(m.le(c, m.join(a, b)));
    assert!(!m.is_distributive());
    assert!(!n5().is_distributive());
}

#[test]
fn powerset_is_distributive_with_atoms_irreducible() {
    let s = FiniteJoinSemilattice::powerset(&["a", "b", "c"]);
    assert_eq!(s.len(), 8);
    assert!(s.is_distributive());
    let names: Vec<String> = s.irreducibles().iter().map(|&i| s.name(i)).collect();
    assert_eq!(names, vec!["{a}", "{b}", "{c}"]);
}

#[test]
fn from_sets_names_and_joins() {
    let s = FiniteJoinSemilattice::from_sets(&[0, 0b1, 0b110, 0b111]).unwrap();
    let a = s.index_of_name("{0}").unwrap();
    let b = s.index_of_name("{1,2}").unwrap();
    assert_eq!(s.name(s.join(a, b)), "{0,1,2}");
    assert_eq!(s.name(s.zero()), "{}");
}

#[test]
fn join_table_round_trip() {
    let s = FiniteJoinSemilattice::powerset(&["a", "b"]);
    let n = s.len();
    let table: Vec<usize> = (0..n * n).map(|k| s.join(k / n, k % n)).collect();
    let elements: Vec<Element> = (0..n).map(|i| s.element(i).clone()).collect();
    let back = FiniteJoinSemilattice::from_join_table(elements, &table).unwrap();
    assert_eq!(back, s);
}

#[test]
fn bad_join_table_is_rejected() {
    let e = common::names("j", 2);
    assert!(FiniteJoinSemilattice::from_join_table(e, &[0, 1, 0, 1]).is_err());
}

#[test]
fn homomorphism_checks() {
    let two = FiniteJoinSemilattice::chain(&["0", "1"]);
    let ab = FiniteJoinSemilattice::powerset(&["a", "b"]);
    let good = Homomorphism { map: vec![ab.zero(), ab.top()], preserves_unit: true };
    assert_eq!(good.check(&two, &ab), Ok(()));
    assert!(good.separates_zero(&two, &ab));
    let a = ab.index_of_name("{a}").unwrap();
    let no_unit = Homomorphism { map: vec![ab.zero(), a], preserves_unit: true };
    assert!(matches!(no_unit.check(&two, &ab), Err(HomomorphismError::Unit)));
    let no_zero = Homomorphism { map: vec![a, ab.top()], preserves_unit: true };
    assert!(matches!(no_zero.check(&two, &ab), Err(HomomorphismError::Zero)));
}

/// Independent count: all labeled partial orders on `n` points, then
/// isomorphism classes by minimizing over every permutation.
fn brute_force_classes(n: usize) -> usize {
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|(a, b)| a != b).collect();
    let perms = permutations(n);
    let mut classes = std::collections::BTreeSet::new();
    for bits in 0u32..1 << cells.len() {
        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
        }
        for (k, &(a, b)) in cells.iter().enumerate() {
            le[a * n + b] = bits >> k & 1 == 1;
        }
        if pmeasure_core::order::validate_relation(n, &le).is_err() {
            continue;
        }
        let code = perms
            .iter()
            .map(|p| (0..n * n).fold(0u64, |c, k| c << 1 | u64::from(le[p[k / n] * n + p[k % n]])))
            .min()
            .unwrap();
        classes.insert(code);
    }
    classes.len()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn poset_classes_match_brute_force() {
    for n in 1..=4 {
        assert_eq!(posets_up_to_iso(n).len(), brute_force_classes(n), "n = {n}");
    }
}

#[test]
fn class_counts_are_frozen() {
    let posets: Vec<usize> = (1..=6).map(|n| posets_up_to_iso(n).len()).collect();
    assert_eq!(posets, vec![1, 2, 5, 16, 63, 318]);
    let lattices: Vec<usize> = (1..=6).map(|n| lattices_up_to_iso(n).len()).collect();
    assert_eq!(lattices, vec![1, 1, 1, 2, 5, 15]);
}

/// Distributivity of a lattice in the usual meet-over-join form.
fn lattice_distributive(s: &FiniteJoinSemilattice) -> bool {
    let n = s.len();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| s.meet(a, s.join(b, c)) == s.join(s.meet(a, b), s.meet(a, c)))))
}

#[test]
fn splitting_distributivity_agrees_with_lattice_distributivity() {
    for n in 1..=7 {
        for s in lattices_up_to_iso(n) {
            assert_eq!(s.is_distributive(), lattice_distributive(&s));
        }
    }
}

#[test]
fn irreducibles_have_one_lower_cover() {
    for n in 1..=6 {
        for s in lattices_up_to_iso(n) {
            let by_covers: Vec<usize> = (0..s.len()).filter(|&x| s.poset().lower_covers(x).len() == 1).collect();
            assert_eq!(s.irreducibles(), &by_covers[..]);
        }
    }
}

#[test]
fn generated_subsemilattice_is_join_closed() {
    let s = FiniteJoinSemilattice::powerset(&["a", "b", "c"]);
    let a = s.index_of_name("{a}").unwrap();
    let bc = s.index_of_name("{b,c}").unwrap();
    let g = s.generated_subsemilattice(&[a, bc]);
    let names: Vec<String> = g.iter().map(|&i| s.name(i)).collect();
    assert_eq!(names.len(), 4);
    assert!(names.contains(&"{a,b,c}".to_string()) && names.contains(&"{}".to_string()));
}

fn poset_strategy() -> impl Strategy<Value = FinitePoset> {
    (1usize..9, any::<u64>()).prop_map(|(n, seed)| {
        let mut r = common::rng(seed);
        common::random_poset(&mut r, "v", n, 0.4)
    })
}

proptest! {
    #[test]
    fn joins_are_least_upper_bounds(p in poset_strategy()) {
        for a in 0..p.len() {
            for b in 0..p.len() {
                let ub: Vec<usize> = (0..p.len()).filter(|&z| p.le(a, z) && p.le(b, z)).collect();
                match p.join(a, b) {
                    Some(j) => prop_assert!(ub.contains(&j) && ub.iter().all(|&z| p.le(j, z))),
                    None => prop_assert!(ub.iter().all(|&z| ub.iter().any(|&w| !p.le(z, w)))),
                }
            }
        }
    }

    #[test]
    fn covers_generate_the_order(p in poset_strategy()) {
        let n = p.len();
        let mut reach = vec![false; n * n];
        for x in 0..n {
            let mut stack = vec![x];
            while let Some(y) = stack.pop() {
                if !reach[x * n + y] {
                    reach[x * n + y] = true;
                    stack.extend(p.upper_covers(y).iter().copied());
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(reach[x * n + y], p.le(x, y));
            }
        }
    }

    #[test]
    fn linear_extension_respects_order(p in poset_strategy()) {
        let l = p.linear_extension();
        let pos: Vec<usize> = (0..p.len()).map(|x| l.iter().position(|&y| y == x).unwrap()).collect();
        for x in 0..p.len() {
            for y in 0..p.len() {
                if p.lt(x, y) {
                    prop_assert!(pos[x] < pos[y]);
                }
            }
        }
    }

    #[test]
    fn induced_subposets_embed(p in poset_strategy(), mask in any::<u16>()) {
        let subset: Vec<usize> = (0..p.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let q = p.induced(&subset);
        prop_assert!(q.is_induced_in(&p));
    }

    #[test]
    fn lattice_ops_agree_with_pairwise(p in poset_strategy()) {
        if let Some(t) = p.lattice_ops() {
            for a in 0..p.len() {
                for b in 0..p.len() {
                    prop_assert_eq!(Some(t.join(a, b)), p.join(a, b));
                    prop_assert_eq!(Some(t.meet(a, b)), p.meet(a, b));
                }
            }
        } else {
            prop_assert!(!p.is_lattice());
        }
    }

    #[test]
    fn powerset_maps_are_homomorphisms(seed in any::<u64>(), k in 1usize..4, l in 1usize..4) {
        let mut r = common::rng(seed);
        let src = common::powerset_of(k);
        let tgt = common::powerset_of(l);
        let phi = common::random_unital_map(&mut r, &src, &tgt);
        prop_assert_eq!(phi.check(&src, &tgt), Ok(()));
        let id = Homomorphism::identity(tgt.len());
        prop_assert_eq!(phi.compose(&id), phi.clone());
    }
}
