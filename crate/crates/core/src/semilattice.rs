//! Finite join-semilattices with zero, their join-irreducibles and
//! homomorphisms.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::element::Element;
use crate::order::{FinitePoset, OrderError};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SemilatticeError {
    #[error("empty semilattice")]
    Empty,
    #[error("no least element")]
    NoZero,
    #[error("{0} and {1} have no join")]
    NoJoin(Element, Element),
    #[error("join table is not a semilattice operation at ({0}, {1})")]
    BadJoinTable(Element, Element),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// A finite `<join, 0>`-semilattice. Finite semilattices with zero are
/// lattices, so the meet table is always available.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteJoinSemilattice {
    poset: FinitePoset,
    join: Vec<usize>,
    meet: Vec<usize>,
    zero: usize,
    unit: Option<usize>,
    irreducibles: Vec<usize>,
}

impl FiniteJoinSemilattice {
    /// Derives joins from the order. The greatest element is recorded as unit.
    pub fn from_poset(poset: FinitePoset) -> Result<Self, SemilatticeError> {
        let n = poset.len();
        if n == 0 {
            return Err(SemilatticeError::Empty);
        }
        let zero = poset.least().ok_or(SemilatticeError::NoZero)?;
        let mut join = vec![0; n * n];
        for a in 0..n {
            for b in a..n {
                let j = poset
                    .join(a, b)
                    .ok_or_else(|| SemilatticeError::NoJoin(poset.element(a).clone(), poset.element(b).clone()))?;
                join[a * n + b] = j;
                join[b * n + a] = j;
            }
        }
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in a..n {
                // join of all common lower bounds; nonempty since zero is one
                let mut m = zero;
                for z in poset.down_set(a) {
                    if poset.le(z, b) {
                        m = join[m * n + z];
                    }
                }
                meet[a * n + b] = m;
                meet[b * n + a] = m;
            }
        }
        let unit = poset.greatest();
        let mut s = FiniteJoinSemilattice { poset, join, meet, zero, unit, irreducibles: Vec::new() };
        s.irreducibles = (0..n).filter(|&p| s.compute_irreducible(p)).collect();
        Ok(s)
    }

    /// Builds from a join table over the given elements; the order is
    /// `a <= b` iff `a v b = b`.
    pub fn from_join_table(elements: Vec<Element>, table: &[usize]) -> Result<Self, SemilatticeError> {
        let n = elements.len();
        if n == 0 {
            return Err(SemilatticeError::Empty);
        }
        if table.len() != n * n || table.iter().any(|&v| v >= n) {
            return Err(SemilatticeError::Order(OrderError::Shape { expected: n * n, got: table.len() }));
        }
        let j = |a: usize, b: usize| table[a * n + b];
        for a in 0..n {
            if j(a, a) != a {
                return Err(SemilatticeError::BadJoinTable(elements[a].clone(), elements[a].clone()));
            }
            for b in 0..n {
                if j(a, b) != j(b, a) {
                    return Err(SemilatticeError::BadJoinTable(elements[a].clone(), elements[b].clone()));
                }
                for c in 0..n {
                    if j(j(a, b), c) != j(a, j(b, c)) {
                        return Err(SemilatticeError::BadJoinTable(elements[a].clone(), elements[b].clone()));
                    }
                }
            }
        }
        let mut le = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                le[a * n + b] = j(a, b) == b;
            }
        }
        let poset = FinitePoset::new(elements, &le)?;
        let s = Self::from_poset(poset)?;
        debug_assert_eq!(s.join, table);
        Ok(s)
    }

    /// Union-closed family of subsets of `{0..width}` (as bit masks), which
    /// must contain the empty set. Elements are named in set notation.
    pub fn from_sets(sets: &[u64]) -> Result<Self, SemilatticeError> {
        let mut family: Vec<u64> = sets.to_vec();
        family.sort_unstable();
        family.dedup();
        let elements: Vec<Element> = family.iter().map(|&s| Element::Base(set_name(s))).collect();
        let n = family.len();
        let mut le = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                le[a * n + b] = family[a] & !family[b] == 0;
            }
        }
        Self::from_poset(FinitePoset::new(elements, &le)?)
    }

    /// Powerset of the given atoms, ordered by inclusion; elements are named
    /// by listing atoms in braces.
    pub fn powerset(atoms: &[&str]) -> Self {
        let k = atoms.len();
        let n = 1usize << k;
        let name = |mask: usize| {
            let parts: Vec<&str> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| atoms[i]).collect();
            let mut s = String::from("{");
            s.push_str(&parts.join(","));
            s.push('}');
            s
        };
        let elements: Vec<Element> = (0..n).map(|m| Element::Base(name(m))).collect();
        let mut le = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                le[a * n + b] = a & !b == 0;
            }
        }
        Self::from_poset(FinitePoset::new(elements, &le).expect("powerset order")).expect("powerset is a lattice")
    }

    /// Chain `names[0] < names[1] < ...`.
    pub fn chain(names: &[&str]) -> Self {
        Self::from_poset(FinitePoset::chain(names)).expect("nonempty chain")
    }

    /// Forgets the unit, so the value is treated as a plain `<join, 0>`-semilattice.
    pub fn without_unit(mut self) -> Self {
        self.unit = None;
        self
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    /// Greatest element, whether or not it is flagged as unit.
    pub fn top(&self) -> usize {
        self.poset.greatest().expect("finite semilattice has a top")
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.len() + b]
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b]
    }

    #[inline]
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.poset.le(a, b)
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.zero, |acc, x| self.join(acc, x))
    }

    pub fn meet_all(&self, items: impl IntoIterator<Item = usize>) -> usize {
        items.into_iter().fold(self.top(), |acc, x| self.meet(acc, x))
    }

    pub fn irreducibles(&self) -> &[usize] {
        &self.irreducibles
    }

    pub fn is_irreducible(&self, p: usize) -> bool {
        self.irreducibles.binary_search(&p).is_ok()
    }

    fn compute_irreducible(&self, p: usize) -> bool {
        if p == self.zero {
            return false;
        }
        // the join-closure of the strictly smaller elements has the join of
        // all of them as its largest member
        let below = self.join_all(self.poset.down_set(p).filter(|&q| q != p));
        below != p
    }

    pub fn element(&self, i: usize) -> &Element {
        self.poset.element(i)
    }

    pub fn name(&self, i: usize) -> String {
        format!("{}", self.poset.element(i))
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.poset.index_of_name(name)
    }

    /// Brute-force distributivity: for every `c <= a v b` there must be
    /// `x <= a`, `y <= b` with `c = x v y`. Returns the first failing `(a, b, c)`.
    pub fn distributivity_witness(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        let downs: Vec<Vec<usize>> = (0..n).map(|a| self.poset.down_set(a).collect()).collect();
        let mut reached = vec![false; n];
        for a in 0..n {
            for b in 0..n {
                reached.iter_mut().for_each(|r| *r = false);
                for &x in &downs[a] {
                    for &y in &downs[b] {
                        reached[self.join(x, y)] = true;
                    }
                }
                let m = self.join(a, b);
                for c in 0..n {
                    if self.le(c, m) && !reached[c] {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn is_distributive(&self) -> bool {
        self.distributivity_witness().is_none()
    }

    /// Least subset containing `seed` and zero, closed under joins.
    pub fn generated_subsemilattice(&self, seed: &[usize]) -> BTreeSet<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        set.insert(self.zero);
        let mut frontier: Vec<usize> = seed.to_vec();
        while let Some(x) = frontier.pop() {
            if !set.insert(x) {
                continue;
            }
            let current: Vec<usize> = set.iter().copied().collect();
            for y in current {
                let j = self.join(x, y);
                if !set.contains(&j) {
                    frontier.push(j);
                }
            }
        }
        set
    }

    /// Set-notation name for an element realized as a bit mask.
    pub fn set_name(mask: u64) -> String {
        set_name(mask)
    }
}

pub fn set_name(mask: u64) -> String {
    let mut s = String::from("{");
    let mut first = true;
    for i in 0..64 {
        if mask >> i & 1 == 1 {
            if !first {
                s.push(',');
            }
            first = false;
            s.push_str(&format!("{i}"));
        }
    }
    s.push('}');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HomomorphismError {
    #[error("map has {got} entries, source has {expected}")]
    Arity { expected: usize, got: usize },
    #[error("image of {0} is outside the target")]
    OutOfRange(usize),
    #[error("zero is not sent to zero")]
    Zero,
    #[error("join of {0} and {1} is not preserved")]
    Join(usize, usize),
    #[error("unit is not sent to unit")]
    Unit,
}

/// A join-homomorphism given by its table on element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    pub map: Vec<usize>,
    pub preserves_unit: bool,
}

impl Homomorphism {
    pub fn identity(n: usize) -> Self {
        Homomorphism { map: (0..n).collect(), preserves_unit: true }
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    /// Matches elements by equal names.
    pub fn inclusion(src: &FiniteJoinSemilattice, tgt: &FiniteJoinSemilattice) -> Option<Self> {
        let map: Option<Vec<usize>> = (0..src.len()).map(|i| tgt.poset().index_of(src.element(i))).collect();
        Some(Homomorphism { map: map?, preserves_unit: true })
    }

    pub fn compose(&self, then: &Homomorphism) -> Homomorphism {
        Homomorphism {
            map: self.map.iter().map(|&a| then.map[a]).collect(),
            preserves_unit: self.preserves_unit && then.preserves_unit,
        }
    }

    pub fn check(&self, src: &FiniteJoinSemilattice, tgt: &FiniteJoinSemilattice) -> Result<(), HomomorphismError> {
        if self.map.len() != src.len() {
            return Err(HomomorphismError::Arity { expected: src.len(), got: self.map.len() });
        }
        if let Some(i) = self.map.iter().position(|&v| v >= tgt.len()) {
            return Err(HomomorphismError::OutOfRange(i));
        }
        if self.map[src.zero()] != tgt.zero() {
            return Err(HomomorphismError::Zero);
        }
        for a in 0..src.len() {
            for b in a + 1..src.len() {
                if self.map[src.join(a, b)] != tgt.join(self.map[a], self.map[b]) {
                    return Err(HomomorphismError::Join(a, b));
                }
            }
        }
        if self.preserves_unit && self.map[src.top()] != tgt.top() {
            return Err(HomomorphismError::Unit);
        }
        Ok(())
    }

    /// Only zero maps to zero.
    pub fn separates_zero(&self, src: &FiniteJoinSemilattice, tgt: &FiniteJoinSemilattice) -> bool {
        (0..src.len()).all(|a| a == src.zero() || self.map[a] != tgt.zero())
    }
}
