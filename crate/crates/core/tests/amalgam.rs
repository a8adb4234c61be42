mod common;

use pmeasure_core::amalgam::{
    amalgam_lattice_ops, amalgam_measure, amalgam_measure_with, amalgam_order, chain_meets, check_db1_db2,
    check_order_independence, check_propagation, check_simplebvd, compute_bullets, three_step_meets,
    validate_normal_diagram, AmalgamError, AmalgamMeasure, Capped, MeasuredDiagram, StrongAmalgam,
};
use pmeasure_core::construct::{represent_diagram, ConstructError, ConstructOptions, ConstructionRun};
use pmeasure_core::semilattice::FiniteJoinSemilattice;
use proptest::prelude::*;
use rand::Rng;

fn opts() -> ConstructOptions {
    ConstructOptions { budget: 4_000, ..ConstructOptions::default() }
}

/// Amalgams of every non-least level of a run, with their measures.
fn amalgams(run: &ConstructionRun) -> Vec<(MeasuredDiagram, StrongAmalgam, AmalgamMeasure)> {
    let mut out = Vec::new();
    for (&level, lvl) in &run.levels {
        if lvl.amalgam.is_none() {
            continue;
        }
        let ideal = run.output.restrict_to_ideal(level);
        let a = amalgam_order(&ideal, Some(level)).unwrap();
        let m = amalgam_measure(&ideal, &a, level).unwrap();
        out.push((ideal, a, m));
    }
    out
}

/// The order generated by the block orders, by transitive closure.
fn generated_order(md: &MeasuredDiagram, a: &StrongAmalgam) -> Vec<bool> {
    let n = a.len();
    let mut le = vec![false; n * n];
    for x in 0..n {
        le[x * n + x] = true;
    }
    for &i in &a.members {
        let pos = &a.blocks[&i];
        let q = &md.blocks[&i].poset;
        for u in 0..pos.len() {
            for v in 0..pos.len() {
                if q.le(u, v) {
                    le[pos[u] * n + pos[v]] = true;
                }
            }
        }
    }
    for k in 0..n {
        for x in 0..n {
            for y in 0..n {
                if le[x * n + k] && le[k * n + y] {
                    le[x * n + y] = true;
                }
            }
        }
    }
    le
}

/// Meet of `bvo` joins over every sequence `x = z_0, ..., z_k = y` with
/// `1 <= k <= bound`, by plain enumeration.
fn brute_chain_meets(m: &AmalgamMeasure, bound: usize) -> Vec<Capped> {
    let d = m.target();
    let n = m.measured.len();
    let mut out = vec![Capped::Top; n * n];
    for x in 0..n {
        for y in 0..n {
            let mut acc = Capped::Top;
            let mut stack = vec![(x, 0usize, Capped::Value(d.zero()))];
            while let Some((z, k, sofar)) = stack.pop() {
                if k >= 1 && z == y {
                    acc = acc.meet(sofar, d);
                }
                if k == bound {
                    continue;
                }
                for w in 0..n {
                    stack.push((w, k + 1, sofar.join(m.bvo(z, w), d)));
                }
            }
            out[x * n + y] = acc;
        }
    }
    out
}

fn check_run_amalgams(run: &ConstructionRun, oracle_limit: usize) -> Result<(), TestCaseError> {
    for (md, a, m) in amalgams(run) {
        let gen = generated_order(&md, &a);
        let n = a.len();
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(a.carrier.le(x, y), gen[x * n + y]);
            }
        }
        prop_assert_eq!(check_order_independence(&md, &a), Ok(()));
        prop_assert!(amalgam_lattice_ops(&md, &a).is_ok());
        prop_assert_eq!(compute_bullets(&md, &a), Ok(()));
        prop_assert_eq!(m.measured.validate(), Ok(()));
        prop_assert_eq!(check_simplebvd(&m, 5), Ok(()));
        prop_assert_eq!(check_propagation(&md, &a, &m), Ok(()));
        let full = amalgam_measure_with(&md, &a, m.level, false).unwrap();
        prop_assert_eq!(&full.measured, &m.measured);
        if n <= oracle_limit {
            prop_assert_eq!(chain_meets(&m, 4), brute_chain_meets(&m, 4));
            // chains longer than n repeat a point and can be shortened
            let three = three_step_meets(&m);
            let short = brute_chain_meets(&m, 5.min(n.max(3)));
            let closure = chain_meets(&m, n.max(3));
            for k in 0..n * n {
                prop_assert_eq!(three[k], short[k]);
                prop_assert_eq!(three[k], closure[k]);
                prop_assert_eq!(three[k], Capped::Value(m.measured.mu[k]));
            }
        }
    }
    Ok(())
}

#[test]
fn square_diagram_amalgam() {
    let run = represent_diagram(&common::square_diagram(), opts()).unwrap();
    let ab = run.index_of("ab").unwrap();
    let found = amalgams(&run);
    let (md, a, _) = found.iter().find(|(_, a, _)| a.top == Some(ab)).unwrap();
    // {0, 1} plus one middle point from each side
    assert_eq!(a.len(), 4);
    assert_eq!(a.members.len(), 3);
    let e = run.index_of("e").unwrap();
    assert_eq!(a.base, e);
    let off_base: Vec<usize> = (0..a.len()).filter(|&x| a.nu[x] != e).collect();
    assert_eq!(off_base.len(), 2);
    for &x in &off_base {
        let (lo, hi) = a.bullets[x].unwrap();
        assert_eq!((a.nu[lo], a.nu[hi]), (e, e));
        assert!(a.carrier.lt(lo, x) && a.carrier.lt(x, hi));
    }
    assert!(!a.carrier.le(off_base[0], off_base[1]) && !a.carrier.le(off_base[1], off_base[0]));
    assert!(validate_normal_diagram(md).all_ok());
    check_run_amalgams(&run, 8).unwrap();
}

#[test]
fn amalgam_of_nothing_and_bad_tops() {
    let run = represent_diagram(&common::square_diagram(), opts()).unwrap();
    let e = run.index_of("e").unwrap();
    assert_eq!(amalgam_order(&run.output, Some(e)).unwrap_err(), AmalgamError::NoBlocks);
    assert_eq!(amalgam_order(&run.output, Some(99)).unwrap_err(), AmalgamError::BadTop(99));
    let ab = run.index_of("ab").unwrap();
    let a = amalgam_order(&run.output.restrict_to_ideal(ab), Some(ab)).unwrap();
    let wrong = run.index_of("a").unwrap();
    assert_eq!(amalgam_measure(&run.output, &a, wrong).unwrap_err(), AmalgamError::BadTop(wrong));
}

#[test]
fn whole_output_is_an_amalgam_of_itself() {
    // with no top, the amalgam of all blocks is the block at the top index
    let run = represent_diagram(&common::square_diagram(), opts()).unwrap();
    let a = amalgam_order(&run.output, None).unwrap();
    let ab = run.index_of("ab").unwrap();
    assert_eq!(a.len(), run.block(ab).len());
    assert!(check_db1_db2(&run.output).all_ok());
}

#[test]
fn capped_arithmetic() {
    let d = FiniteJoinSemilattice::powerset(&["a", "b"]);
    let a = Capped::Value(d.index_of_name("{a}").unwrap());
    let b = Capped::Value(d.index_of_name("{b}").unwrap());
    assert_eq!(a.join(b, &d), Capped::Value(d.top()));
    assert_eq!(a.meet(b, &d), Capped::Value(d.zero()));
    assert_eq!(a.join(Capped::Top, &d), Capped::Top);
    assert_eq!(Capped::Top.meet(b, &d), b);
    assert!(a.le(Capped::Top, &d) && !Capped::Top.le(a, &d));
    assert_eq!(Capped::Top.value(), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chain_diagram_amalgams(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let len = r.gen_range(2..=3);
        let sizes: Vec<usize> = (0..len).map(|_| r.gen_range(1..=2)).collect();
        let d = common::random_chain_diagram(&mut r, &sizes);
        match represent_diagram(&d, opts()) {
            Ok(run) => {
                prop_assert!(check_db1_db2(&run.output).all_ok());
                check_run_amalgams(&run, 12)?;
            }
            Err(ConstructError::BudgetExceeded { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn square_diagram_amalgams(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let (ka, kb) = (r.gen_range(1..=2), r.gen_range(1..=2));
        let kab = r.gen_range(1..=2);
        let d = common::random_square_diagram(&mut r, ka, kb, kab);
        match represent_diagram(&d, opts()) {
            Ok(run) => {
                prop_assert!(check_db1_db2(&run.output).all_ok());
                check_run_amalgams(&run, 12)?;
            }
            Err(ConstructError::BudgetExceeded { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
