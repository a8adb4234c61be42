//! Towers of induced sub-posets: the composition laws of the extension
//! kinds, and a search for interval extensions that do not compose.

use alloc::vec::Vec;

use crate::extension::{analyze_extension, compose_check, LawViolation};
use crate::lab::enumerate::posets_up_to_iso;
use crate::order::FinitePoset;

/// `P <= Q <= R` as induced sub-posets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub p: FinitePoset,
    pub q: FinitePoset,
    pub r: FinitePoset,
}

fn subsets_of(items: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0u32..1 << items.len()).map(move |m| (0..items.len()).filter(|&b| m >> b & 1 == 1).map(|b| items[b]).collect())
}

/// Every tower with nonempty `P` inside each `R` on `n` points, `R` up to
/// isomorphism.
fn towers(n: usize) -> impl Iterator<Item = Triple> {
    posets_up_to_iso(n).into_iter().flat_map(|r| {
        let all: Vec<usize> = (0..r.len()).collect();
        let mut out = Vec::new();
        for qs in subsets_of(&all) {
            if qs.is_empty() {
                continue;
            }
            let q = r.induced(&qs);
            for ps in subsets_of(&qs) {
                if ps.is_empty() {
                    continue;
                }
                out.push(Triple { p: r.induced(&ps), q: q.clone(), r: r.clone() });
            }
        }
        out
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompositionSummary {
    pub towers: usize,
    pub rc_rc: usize,
    pub int_cov: usize,
    pub cov_cov: usize,
    pub int_int: usize,
    pub int_int_failures: usize,
    pub violations: Vec<(LawViolation, Triple)>,
}

/// Checks the composition laws on every tower with `|R| <= max`.
pub fn composition_laws(max: usize) -> CompositionSummary {
    let mut s = CompositionSummary::default();
    for n in 1..=max {
        for t in towers(n) {
            let rep = compose_check(&t.p, &t.q, &t.r).expect("towers are induced");
            s.towers += 1;
            s.rc_rc += usize::from(rep.pq.rc && rep.qr.rc);
            s.int_cov += usize::from(rep.pq.int && rep.qr.cov);
            s.cov_cov += usize::from(rep.pq.cov && rep.qr.cov);
            s.int_int += usize::from(rep.pq.int && rep.qr.int);
            s.int_int_failures += usize::from(rep.int_int_fails);
            if let Some(v) = rep.violation {
                s.violations.push((v, t));
            }
        }
    }
    s
}

/// Smallest tower (by `|R|`, then enumeration order) with `P <=cov Q`,
/// `Q <=int R` but not `Q <=cov R`, and `P` not an interval sub-poset of `R`.
pub fn find_noncomposing_interval_triple(max: usize) -> Option<Triple> {
    for n in 1..=max {
        for t in towers(n) {
            let pq = analyze_extension(&t.p, &t.q).expect("induced");
            if !pq.is_cov() {
                continue;
            }
            let qr = analyze_extension(&t.q, &t.r).expect("induced");
            if !qr.is_int() || qr.is_cov() {
                continue;
            }
            let pr = analyze_extension(&t.p, &t.r).expect("induced");
            if !pr.is_int() {
                return Some(t);
            }
        }
    }
    None
}
