//! Finite posets stored as a full order matrix with derived covers.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::{intersection_count, BitMatrix};
use crate::element::Element;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OrderError {
    #[error("element {0} listed twice")]
    DuplicateElement(Element),
    #[error("relation table has {got} entries, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("unknown element {0}")]
    UnknownElement(Element),
    #[error("{0} is not below itself")]
    Reflexivity(Element),
    #[error("antisymmetry fails for ({0}, {1})")]
    Antisymmetry(Element, Element),
    #[error("transitivity fails: ({0}, {1}) missing")]
    Transitivity(Element, Element),
}

/// First violation of the order axioms in a raw relation, as index pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderViolation {
    Reflexivity(usize),
    Antisymmetry(usize, usize),
    Transitivity(usize, usize),
}

/// Checks a raw `n x n` relation (row-major, `le[i*n+j]` means `i <= j`).
pub fn validate_relation(n: usize, le: &[bool]) -> Result<(), OrderViolation> {
    for i in 0..n {
        if !le[i * n + i] {
            return Err(OrderViolation::Reflexivity(i));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if le[i * n + j] && le[j * n + i] {
                return Err(OrderViolation::Antisymmetry(i, j));
            }
        }
    }
    for i in 0..n {
        for k in 0..n {
            if le[i * n + k] {
                continue;
            }
            if (0..n).any(|j| le[i * n + j] && le[j * n + k]) {
                return Err(OrderViolation::Transitivity(i, k));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct FinitePoset {
    elements: Vec<Element>,
    index: BTreeMap<Element, usize>,
    le: BitMatrix,
    ge: BitMatrix,
    upper_covers: Vec<Vec<usize>>,
    lower_covers: Vec<Vec<usize>>,
}

impl PartialEq for FinitePoset {
    fn eq(&self, other: &Self) -> bool {
        self.elements == other.elements && self.le == other.le
    }
}

impl Eq for FinitePoset {}

fn index_elements(elements: &[Element]) -> Result<BTreeMap<Element, usize>, OrderError> {
    let mut index = BTreeMap::new();
    for (i, e) in elements.iter().enumerate() {
        if index.insert(e.clone(), i).is_some() {
            return Err(OrderError::DuplicateElement(e.clone()));
        }
    }
    Ok(index)
}

impl FinitePoset {
    /// Builds a poset from a full relation table, validating the axioms.
    pub fn new(elements: Vec<Element>, le: &[bool]) -> Result<Self, OrderError> {
        let n = elements.len();
        if le.len() != n * n {
            return Err(OrderError::Shape { expected: n * n, got: le.len() });
        }
        let index = index_elements(&elements)?;
        if let Err(v) = validate_relation(n, le) {
            return Err(match v {
                OrderViolation::Reflexivity(i) => OrderError::Reflexivity(elements[i].clone()),
                OrderViolation::Antisymmetry(i, j) => {
                    OrderError::Antisymmetry(elements[i].clone(), elements[j].clone())
                }
                OrderViolation::Transitivity(i, j) => {
                    OrderError::Transitivity(elements[i].clone(), elements[j].clone())
                }
            });
        }
        let mut m = BitMatrix::new(n);
        for i in 0..n {
            for j in 0..n {
                if le[i * n + j] {
                    m.set(i, j, true);
                }
            }
        }
        Ok(Self::from_parts(elements, index, m))
    }

    /// Reflexive-transitive closure of the given pairs; fails on cycles.
    pub fn from_pairs(elements: Vec<Element>, pairs: &[(usize, usize)]) -> Result<Self, OrderError> {
        let n = elements.len();
        let index = index_elements(&elements)?;
        let mut m = BitMatrix::identity(n);
        for &(a, b) in pairs {
            m.set(a, b, true);
        }
        m.transitive_closure();
        for i in 0..n {
            for j in i + 1..n {
                if m.get(i, j) && m.get(j, i) {
                    return Err(OrderError::Antisymmetry(elements[i].clone(), elements[j].clone()));
                }
            }
        }
        Ok(Self::from_parts(elements, index, m))
    }

    /// Same as [`FinitePoset::from_pairs`] with pairs given by element.
    pub fn from_element_pairs(elements: Vec<Element>, pairs: &[(Element, Element)]) -> Result<Self, OrderError> {
        let index = index_elements(&elements)?;
        let mut idx = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let ia = *index.get(a).ok_or_else(|| OrderError::UnknownElement(a.clone()))?;
            let ib = *index.get(b).ok_or_else(|| OrderError::UnknownElement(b.clone()))?;
            idx.push((ia, ib));
        }
        Self::from_pairs(elements, &idx)
    }

    /// Caller guarantees `le` is a partial order.
    pub(crate) fn from_matrix(elements: Vec<Element>, le: BitMatrix) -> Result<Self, OrderError> {
        let index = index_elements(&elements)?;
        Ok(Self::from_parts(elements, index, le))
    }

    fn from_parts(elements: Vec<Element>, index: BTreeMap<Element, usize>, le: BitMatrix) -> Self {
        let n = elements.len();
        let ge = le.transpose();
        let mut upper_covers = vec![Vec::new(); n];
        let mut lower_covers = vec![Vec::new(); n];
        for a in 0..n {
            for b in le.row_iter(a) {
                // b covers a iff the interval [a,b] is exactly {a,b}
                if a != b && intersection_count(le.row(a), ge.row(b)) == 2 {
                    upper_covers[a].push(b);
                    lower_covers[b].push(a);
                }
            }
        }
        FinitePoset { elements, index, le, ge, upper_covers, lower_covers }
    }

    /// Chain `names[0] < names[1] < ...`.
    pub fn chain(names: &[&str]) -> Self {
        let elements: Vec<Element> = names.iter().map(|s| Element::base(*s)).collect();
        let pairs: Vec<(usize, usize)> = (1..names.len()).map(|i| (i - 1, i)).collect();
        Self::from_pairs(elements, &pairs).expect("chain names must be distinct")
    }

    /// Chain on the given elements, in order.
    pub fn chain_of(elements: Vec<Element>) -> Self {
        let pairs: Vec<(usize, usize)> = (1..elements.len()).map(|i| (i - 1, i)).collect();
        Self::from_pairs(elements, &pairs).expect("chain elements must be distinct")
    }

    /// Antichain on the given names.
    pub fn antichain(names: &[&str]) -> Self {
        let elements: Vec<Element> = names.iter().map(|s| Element::base(*s)).collect();
        Self::from_pairs(elements, &[]).expect("antichain names must be distinct")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Element {
        &self.elements[i]
    }

    pub fn index_of(&self, e: &Element) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.index.get(&Element::base(name)).copied()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.index.contains_key(e)
    }

    #[inline]
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le.get(a, b)
    }

    #[inline]
    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.le.get(a, b)
    }

    #[inline]
    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.le.get(a, b) || self.le.get(b, a)
    }

    /// `a` is covered by `b`.
    pub fn covers(&self, a: usize, b: usize) -> bool {
        self.upper_covers[a].contains(&b)
    }

    /// `a` is covered by or equal to `b`.
    pub fn covers_or_eq(&self, a: usize, b: usize) -> bool {
        a == b || self.covers(a, b)
    }

    pub fn upper_covers(&self, a: usize) -> &[usize] {
        &self.upper_covers[a]
    }

    pub fn lower_covers(&self, a: usize) -> &[usize] {
        &self.lower_covers[a]
    }

    /// All cover pairs `(a, b)` with `a` covered by `b`, in canonical order.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for &b in &self.upper_covers[a] {
                out.push((a, b));
            }
        }
        out
    }

    pub fn up_set(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.le.row_iter(a)
    }

    pub fn down_set(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.ge.row_iter(a)
    }

    /// Closed interval `[a, b]`, in element order.
    pub fn interval(&self, a: usize, b: usize) -> Vec<usize> {
        self.le.row_iter(a).filter(|&z| self.le(z, b)).collect()
    }

    pub fn least(&self) -> Option<usize> {
        (0..self.len()).find(|&i| self.le.row_count(i) == self.len())
    }

    pub fn greatest(&self) -> Option<usize> {
        (0..self.len()).find(|&i| self.ge.row_count(i) == self.len())
    }

    /// Maximum of a subset, if it has one.
    pub fn max_of(&self, set: &[usize]) -> Option<usize> {
        set.iter().copied().find(|&m| set.iter().all(|&z| self.le(z, m)))
    }

    pub fn min_of(&self, set: &[usize]) -> Option<usize> {
        set.iter().copied().find(|&m| set.iter().all(|&z| self.le(m, z)))
    }

    /// Least upper bound of `a` and `b`.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        let uppers: Vec<usize> = self.le.row_iter(a).filter(|&z| self.le(b, z)).collect();
        self.min_of(&uppers)
    }

    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let lowers: Vec<usize> = self.ge.row_iter(a).filter(|&z| self.le(z, b)).collect();
        self.max_of(&lowers)
    }

    /// Least upper bound of an arbitrary subset (the empty join is the least element).
    pub fn join_of(&self, set: &[usize]) -> Option<usize> {
        let uppers: Vec<usize> = (0..self.len()).filter(|&z| set.iter().all(|&x| self.le(x, z))).collect();
        self.min_of(&uppers)
    }

    pub fn meet_of(&self, set: &[usize]) -> Option<usize> {
        let lowers: Vec<usize> = (0..self.len()).filter(|&z| set.iter().all(|&x| self.le(z, x))).collect();
        self.max_of(&lowers)
    }

    /// Join and meet tables, present only if every pair has both.
    pub fn lattice_ops(&self) -> Option<LatticeTables> {
        let n = self.len();
        if n == 0 {
            return None;
        }
        let mut join = vec![0; n * n];
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in a..n {
                let j = self.join(a, b)?;
                let m = self.meet(a, b)?;
                join[a * n + b] = j;
                join[b * n + a] = j;
                meet[a * n + b] = m;
                meet[b * n + a] = m;
            }
        }
        Some(LatticeTables { n, join, meet })
    }

    pub fn is_lattice(&self) -> bool {
        self.lattice_ops().is_some()
    }

    /// Induced sub-poset on the given indices (kept in the given order).
    pub fn induced(&self, subset: &[usize]) -> Self {
        let elements: Vec<Element> = subset.iter().map(|&i| self.elements[i].clone()).collect();
        let mut m = BitMatrix::new(subset.len());
        for (a, &i) in subset.iter().enumerate() {
            for (b, &j) in subset.iter().enumerate() {
                if self.le(i, j) {
                    m.set(a, b, true);
                }
            }
        }
        Self::from_matrix(elements, m).expect("subset indices must be distinct")
    }

    /// Raw relation as a row-major boolean table.
    pub fn relation(&self) -> Vec<bool> {
        let n = self.len();
        let mut out = vec![false; n * n];
        for i in 0..n {
            for j in self.le.row_iter(i) {
                out[i * n + j] = true;
            }
        }
        out
    }

    /// Length of the longest chain ending at each element (minimal elements get 0).
    pub fn heights(&self) -> Vec<usize> {
        let n = self.len();
        let order = self.linear_extension();
        let mut h = vec![0; n];
        for &b in &order {
            for &a in &self.lower_covers[b] {
                h[b] = h[b].max(h[a] + 1);
            }
        }
        h
    }

    /// Indices sorted so that `a < b` implies `a` comes first.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.ge.row_count(i), i));
        order
    }

    /// Whether `self`'s elements are a subset of `other`'s with the induced order.
    pub fn is_induced_in(&self, other: &FinitePoset) -> bool {
        let map: Option<Vec<usize>> = self.elements.iter().map(|e| other.index_of(e)).collect();
        let Some(map) = map else { return false };
        (0..self.len()).all(|i| (0..self.len()).all(|j| self.le(i, j) == other.le(map[i], map[j])))
    }

    /// Position of each of `self`'s elements inside `other`.
    pub fn embedding_into(&self, other: &FinitePoset) -> Option<Vec<usize>> {
        self.elements.iter().map(|e| other.index_of(e)).collect()
    }

    /// Every pair with a common upper bound has a join, and the poset has a
    /// least element. In a finite poset this is the same as every bounded
    /// subset having a join.
    pub fn bounded_subsets_have_joins(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        if self.least().is_none() {
            return false;
        }
        let n = self.len();
        for a in 0..n {
            for b in a + 1..n {
                let bounded = self.le.row_iter(a).any(|z| self.le(b, z));
                if bounded && self.join(a, b).is_none() {
                    return false;
                }
            }
        }
        true
    }

    /// Every pair has a meet.
    pub fn is_meet_semilattice(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| (a + 1..n).all(|b| self.meet(a, b).is_some()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeTables {
    pub n: usize,
    pub join: Vec<usize>,
    pub meet: Vec<usize>,
}

impl LatticeTables {
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b]
    }
}
