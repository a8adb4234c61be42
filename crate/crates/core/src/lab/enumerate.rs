//! Finite posets up to isomorphism.
//!
//! Every poset on `n + 1` points arises from one on `n` points by adding a
//! maximal element above a down-set, so growing canonical representatives
//! one element at a time and deduplicating by canonical code reaches every
//! isomorphism class.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::element::Element;
use crate::order::FinitePoset;
use crate::semilattice::FiniteJoinSemilattice;

/// Largest size handled; codes are `n * n` bits in a `u64`.
pub const MAX_POINTS: usize = 8;

/// `below[i]`: mask of points `<= i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Rel {
    below: Vec<u16>,
}

impl Rel {
    fn len(&self) -> usize {
        self.below.len()
    }

    fn le(&self, a: usize, b: usize) -> bool {
        self.below[b] >> a & 1 == 1
    }

    fn code(&self, perm: &[usize]) -> u64 {
        // perm[new] = old
        let n = self.len();
        let mut c = 0u64;
        for a in 0..n {
            for b in 0..n {
                c = c << 1 | u64::from(self.le(perm[a], perm[b]));
            }
        }
        c
    }

    /// Minimal code over labelings that sort points by (down, up) counts.
    fn canonical(&self) -> (u64, Vec<usize>) {
        let n = self.len();
        let sig = |i: usize| {
            let down = self.below[i].count_ones();
            let up = (0..n).filter(|&j| self.le(i, j)).count() as u32;
            (down, up)
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| sig(i));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &i in &order {
            match groups.last_mut() {
                Some(g) if sig(g[0]) == sig(i) => g.push(i),
                _ => groups.push(vec![i]),
            }
        }
        let mut best = (u64::MAX, Vec::new());
        let mut current = Vec::with_capacity(n);
        search(self, &groups, 0, &mut current, &mut best);
        best
    }

    fn relabel(&self, perm: &[usize]) -> Rel {
        let n = self.len();
        let mut below = vec![0u16; n];
        for a in 0..n {
            for b in 0..n {
                if self.le(perm[a], perm[b]) {
                    below[b] |= 1 << a;
                }
            }
        }
        Rel { below }
    }

    fn to_poset(&self) -> FinitePoset {
        let n = self.len();
        let elements: Vec<Element> = (0..n).map(|i| Element::base(format!("{i}"))).collect();
        let rel: Vec<bool> = (0..n * n).map(|k| self.le(k / n, k % n)).collect();
        FinitePoset::new(elements, &rel).expect("enumerated relation is a partial order")
    }
}

fn search(rel: &Rel, groups: &[Vec<usize>], g: usize, current: &mut Vec<usize>, best: &mut (u64, Vec<usize>)) {
    if g == groups.len() {
        let c = rel.code(current);
        if c < best.0 {
            *best = (c, current.clone());
        }
        return;
    }
    let mut items = groups[g].clone();
    permute(rel, groups, g, &mut items, 0, current, best);
}

fn permute(
    rel: &Rel,
    groups: &[Vec<usize>],
    g: usize,
    items: &mut Vec<usize>,
    k: usize,
    current: &mut Vec<usize>,
    best: &mut (u64, Vec<usize>),
) {
    if k == items.len() {
        let len = current.len();
        current.extend_from_slice(items);
        search(rel, groups, g + 1, current, best);
        current.truncate(len);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(rel, groups, g, items, k + 1, current, best);
        items.swap(k, i);
    }
}

fn canonical_classes(n: usize) -> Vec<Rel> {
    assert!(n <= MAX_POINTS, "poset enumeration is limited to {MAX_POINTS} points");
    let mut level = vec![Rel { below: Vec::new() }];
    for m in 0..n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for r in &level {
            for ideal in 0u16..(1 << m) {
                let closed = (0..m).filter(|&j| ideal >> j & 1 == 1).all(|j| r.below[j] & !ideal == 0);
                if !closed {
                    continue;
                }
                let mut below = r.below.clone();
                below.push(ideal | 1 << m);
                let grown = Rel { below };
                let (code, perm) = grown.canonical();
                if seen.insert(code) {
                    next.push(grown.relabel(&perm));
                }
            }
        }
        level = next;
    }
    level
}

/// One representative of each isomorphism class of `n`-element posets,
/// with points named `0..n`.
pub fn posets_up_to_iso(n: usize) -> Vec<FinitePoset> {
    canonical_classes(n).iter().map(Rel::to_poset).collect()
}

/// Canonical code of a poset: equal codes exactly for isomorphic posets.
pub fn canonical_code(p: &FinitePoset) -> u64 {
    let n = p.len();
    assert!(n <= MAX_POINTS, "canonical codes are limited to {MAX_POINTS} points");
    let mut below = vec![0u16; n];
    for a in 0..n {
        for b in 0..n {
            if p.le(a, b) {
                below[b] |= 1 << a;
            }
        }
    }
    Rel { below }.canonical().0
}

/// Lattices on `n` points up to isomorphism (equivalently, finite
/// join-semilattices with zero).
pub fn lattices_up_to_iso(n: usize) -> Vec<FiniteJoinSemilattice> {
    posets_up_to_iso(n)
        .into_iter()
        .filter(FinitePoset::is_lattice)
        .map(|p| FiniteJoinSemilattice::from_poset(p).expect("lattice is a join-semilattice"))
        .collect()
}

pub fn distributive_lattices_up_to_iso(n: usize) -> Vec<FiniteJoinSemilattice> {
    lattices_up_to_iso(n).into_iter().filter(FiniteJoinSemilattice::is_distributive).collect()
}
