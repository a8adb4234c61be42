//! Meet-semilattice indexed diagrams of finite semilattices.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::element::Element;
use crate::order::FinitePoset;
use crate::semilattice::{FiniteJoinSemilattice, Homomorphism, HomomorphismError};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("empty index set")]
    Empty,
    #[error("indices {0} and {1} have no meet")]
    NoMeet(Element, Element),
    #[error("index {0} is not a plain name")]
    NotBase(Element),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSemilattice {
    poset: FinitePoset,
    meet: Vec<usize>,
    least: usize,
    height: Vec<usize>,
}

impl IndexSemilattice {
    pub fn new(poset: FinitePoset) -> Result<Self, IndexError> {
        let n = poset.len();
        if n == 0 {
            return Err(IndexError::Empty);
        }
        if let Some(e) = poset.elements().iter().find(|e| e.as_base().is_none()) {
            return Err(IndexError::NotBase(e.clone()));
        }
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in a..n {
                let m = poset
                    .meet(a, b)
                    .ok_or_else(|| IndexError::NoMeet(poset.element(a).clone(), poset.element(b).clone()))?;
                meet[a * n + b] = m;
                meet[b * n + a] = m;
            }
        }
        let least = poset.least().expect("finite meet-semilattice has a least element");
        let height = poset.heights();
        Ok(IndexSemilattice { poset, meet, least, height })
    }

    /// Chain of named indices.
    pub fn chain(names: &[&str]) -> Self {
        Self::new(FinitePoset::chain(names)).expect("chain is a meet-semilattice")
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

    pub fn least(&self) -> usize {
        self.least
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.len() + b]
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.poset.le(a, b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        self.poset.lt(a, b)
    }

    pub fn height(&self, a: usize) -> usize {
        self.height[a]
    }

    pub fn name(&self, a: usize) -> &str {
        self.poset.element(a).as_base().expect("index names are plain")
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.poset.index_of_name(name)
    }

    /// Least upper bound of `a` and `b` among the indices below `top`
    /// (a lattice, being a finite meet-semilattice with a greatest element).
    pub fn join_below(&self, a: usize, b: usize, top: usize) -> Option<usize> {
        if !self.le(a, top) || !self.le(b, top) {
            return None;
        }
        let uppers: Vec<usize> =
            (0..self.len()).filter(|&z| self.le(a, z) && self.le(b, z) && self.le(z, top)).collect();
        self.poset.min_of(&uppers)
    }

    /// Indices sorted by height, then by position.
    pub fn by_height(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.len()).collect();
        v.sort_by_key(|&i| (self.height[i], i));
        v
    }

    /// Adds a new least index named `name` below everything.
    pub fn with_new_bottom(&self, name: &str) -> (Self, Vec<usize>) {
        let mut elements = Vec::with_capacity(self.len() + 1);
        elements.push(Element::base(name));
        elements.extend(self.poset.elements().iter().cloned());
        let mut pairs = Vec::new();
        for i in 0..self.len() {
            pairs.push((0, i + 1));
            for j in 0..self.len() {
                if self.le(i, j) {
                    pairs.push((i + 1, j + 1));
                }
            }
        }
        let poset = FinitePoset::from_pairs(elements, &pairs).expect("fresh bottom keeps the order");
        let shift = (0..self.len()).map(|i| i + 1).collect();
        (Self::new(poset).expect("still a meet-semilattice"), shift)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("expected {expected} objects, got {got}")]
    ObjectCount { expected: usize, got: usize },
    #[error("missing transition {0} -> {1}")]
    MissingTransition(String, String),
    #[error("transition {0} -> {1} given for non-comparable indices")]
    SpuriousTransition(String, String),
    #[error("transition {from} -> {to}: {source}")]
    NotHomomorphism { from: String, to: String, source: HomomorphismError },
    #[error("transition {0} -> {0} is not the identity")]
    NotIdentity(String),
    #[error("composition {0} -> {1} -> {2} differs from the direct map")]
    NotFunctorial(String, String, String),
}

/// Objects indexed by position in `index`; `transitions[(i, j)]` for `i <= j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilatticeDiagram {
    pub index: IndexSemilattice,
    pub objects: Vec<FiniteJoinSemilattice>,
    pub transitions: BTreeMap<(usize, usize), Homomorphism>,
}

impl SemilatticeDiagram {
    /// Fills in identities and checks everything.
    pub fn new(
        index: IndexSemilattice,
        objects: Vec<FiniteJoinSemilattice>,
        mut transitions: BTreeMap<(usize, usize), Homomorphism>,
    ) -> Result<Self, DiagramError> {
        for (i, d) in objects.iter().enumerate() {
            transitions.entry((i, i)).or_insert_with(|| Homomorphism::identity(d.len()));
        }
        let d = SemilatticeDiagram { index, objects, transitions };
        d.validate()?;
        Ok(d)
    }

    /// Single object over a one-point index.
    pub fn single(name: &str, d: FiniteJoinSemilattice) -> Self {
        let index = IndexSemilattice::chain(&[name]);
        Self::new(index, vec![d], BTreeMap::new()).expect("single object diagram")
    }

    /// `{0,1} -> s` over the 2-chain `0 < 1`, sending 1 to the top of `s`.
    pub fn two_chain(s: FiniteJoinSemilattice) -> Self {
        let index = IndexSemilattice::chain(&["0", "1"]);
        let two = FiniteJoinSemilattice::chain(&["0", "1"]);
        let phi = Homomorphism { map: vec![s.zero(), s.top()], preserves_unit: true };
        let mut t = BTreeMap::new();
        t.insert((0, 1), phi);
        Self::new(index, vec![two, s], t).expect("two-chain diagram")
    }

    pub fn phi(&self, i: usize, j: usize) -> &Homomorphism {
        &self.transitions[&(i, j)]
    }

    pub fn object(&self, i: usize) -> &FiniteJoinSemilattice {
        &self.objects[i]
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        let ix = &self.index;
        let n = ix.len();
        if self.objects.len() != n {
            return Err(DiagramError::ObjectCount { expected: n, got: self.objects.len() });
        }
        let name = |i: usize| String::from(ix.name(i));
        for &(i, j) in self.transitions.keys() {
            if i >= n || j >= n || !ix.le(i, j) {
                return Err(DiagramError::SpuriousTransition(name(i.min(n - 1)), name(j.min(n - 1))));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !ix.le(i, j) {
                    continue;
                }
                let phi = self
                    .transitions
                    .get(&(i, j))
                    .ok_or_else(|| DiagramError::MissingTransition(name(i), name(j)))?;
                phi.check(&self.objects[i], &self.objects[j]).map_err(|source| DiagramError::NotHomomorphism {
                    from: name(i),
                    to: name(j),
                    source,
                })?;
                if i == j && phi.map.iter().enumerate().any(|(a, &b)| a != b) {
                    return Err(DiagramError::NotIdentity(name(i)));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !ix.le(i, j) {
                    continue;
                }
                for k in 0..n {
                    if !ix.le(j, k) {
                        continue;
                    }
                    let composed = self.phi(i, j).compose(self.phi(j, k));
                    if composed.map != self.phi(i, k).map {
                        return Err(DiagramError::NotFunctorial(name(i), name(j), name(k)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether every non-identity transition separates zero.
    pub fn separates_zero(&self) -> bool {
        self.transitions
            .iter()
            .all(|(&(i, j), phi)| phi.separates_zero(&self.objects[i], &self.objects[j]))
    }

    /// Adds a new least index carrying `{0,1}` with `1` sent to each top.
    pub fn with_two_element_bottom(&self, name: &str) -> Self {
        let (index, shift) = self.index.with_new_bottom(name);
        let two = FiniteJoinSemilattice::chain(&["0", "1"]);
        let mut objects = Vec::with_capacity(self.objects.len() + 1);
        objects.push(two);
        objects.extend(self.objects.iter().cloned());
        let mut transitions = BTreeMap::new();
        for (&(i, j), phi) in &self.transitions {
            transitions.insert((shift[i], shift[j]), phi.clone());
        }
        for (i, d) in self.objects.iter().enumerate() {
            transitions.insert((0, shift[i]), Homomorphism { map: vec![d.zero(), d.top()], preserves_unit: true });
        }
        Self::new(index, objects, transitions).expect("bottom extension is a diagram")
    }
}
