//! Brute-force enumeration of p-measures, used as an oracle.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::measure::PMeasuredPoset;
use crate::order::FinitePoset;
use crate::semilattice::{FiniteJoinSemilattice, Homomorphism};

/// Values fixed in advance, keyed by poset indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Constraints {
    pub fixed: BTreeMap<(usize, usize), usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EnumerateError {
    #[error("search visited more than {0} nodes")]
    BudgetExceeded(usize),
    #[error("value {2} at ({0}, {1}) is outside the target")]
    OutOfRange(usize, usize, usize),
    #[error("the measured poset is not an induced sub-poset of the search poset")]
    NotInduced,
}

impl Constraints {
    pub fn fix(&mut self, x: usize, y: usize, v: usize) -> &mut Self {
        self.fixed.insert((x, y), v);
        self
    }

    /// The values forced on `sup` by asking it to extend `sub` along `phi`.
    /// Returns `None` when two requirements clash.
    pub fn extending(
        mut self,
        sup: &FinitePoset,
        sub: &PMeasuredPoset,
        phi: &Homomorphism,
    ) -> Result<Option<Self>, EnumerateError> {
        if !sub.poset.is_induced_in(sup) {
            return Err(EnumerateError::NotInduced);
        }
        let embed = sub.poset.embedding_into(sup).expect("induced");
        for x in 0..sub.len() {
            for y in 0..sub.len() {
                let v = phi.apply(sub.value(x, y));
                match self.fixed.insert((embed[x], embed[y]), v) {
                    Some(old) if old != v => return Ok(None),
                    _ => {}
                }
            }
        }
        Ok(Some(self))
    }
}

/// Calls `visit` on every p-measure on `p` with values in `s` that meets the
/// constraints, stopping early when `visit` returns `false`. Returns the
/// number of measures visited.
pub fn enumerate_pmeasures(
    p: &FinitePoset,
    s: Arc<FiniteJoinSemilattice>,
    c: &Constraints,
    budget: usize,
    mut visit: impl FnMut(&PMeasuredPoset) -> bool,
) -> Result<usize, EnumerateError> {
    let n = p.len();
    for (&(x, y), &v) in &c.fixed {
        if v >= s.len() || x >= n || y >= n {
            return Err(EnumerateError::OutOfRange(x, y, v));
        }
        if p.le(x, y) && v != s.zero() {
            return Ok(0);
        }
    }
    let free: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| !p.le(x, y))
        .collect();
    let mut st = Search {
        p,
        s: &s,
        n,
        mu: vec![s.zero(); n * n],
        assigned: (0..n * n).map(|k| p.le(k / n, k % n)).collect(),
        nodes: 0,
        budget,
        found: 0,
        stop: false,
    };
    // fixed values go first so they prune early
    let mut order: Vec<(usize, usize)> = free.iter().copied().filter(|k| c.fixed.contains_key(k)).collect();
    order.extend(free.iter().copied().filter(|k| !c.fixed.contains_key(k)));
    let target = s.clone();
    st.run(&order, 0, c, &mut |mu: &[usize]| {
        let m = PMeasuredPoset::new(p.clone(), target.clone(), mu.to_vec());
        visit(&m)
    })?;
    Ok(st.found)
}

struct Search<'a> {
    p: &'a FinitePoset,
    s: &'a FiniteJoinSemilattice,
    n: usize,
    mu: Vec<usize>,
    assigned: Vec<bool>,
    nodes: usize,
    budget: usize,
    found: usize,
    stop: bool,
}

impl Search<'_> {
    fn consistent(&self, x: usize, z: usize) -> bool {
        let (n, s, mu, a) = (self.n, self.s, &self.mu, &self.assigned);
        let at = |u: usize, v: usize| mu[u * n + v];
        let set = |u: usize, v: usize| a[u * n + v];
        for y in 0..n {
            // (x, z) bounded through y
            if set(x, y) && set(y, z) && !s.le(at(x, z), s.join(at(x, y), at(y, z))) {
                return false;
            }
            // (x, z) as the first step towards y
            if set(z, y) && set(x, y) && !s.le(at(x, y), s.join(at(x, z), at(z, y))) {
                return false;
            }
            // (x, z) as the second step from y
            if set(y, x) && set(y, z) && !s.le(at(y, z), s.join(at(y, x), at(x, z))) {
                return false;
            }
        }
        true
    }

    fn run(
        &mut self,
        order: &[(usize, usize)],
        k: usize,
        c: &Constraints,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Result<(), EnumerateError> {
        if self.stop {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(EnumerateError::BudgetExceeded(self.budget));
        }
        if k == order.len() {
            self.found += 1;
            if !visit(&self.mu) {
                self.stop = true;
            }
            return Ok(());
        }
        let (x, z) = order[k];
        let idx = x * self.n + z;
        let choices: Vec<usize> = match c.fixed.get(&(x, z)) {
            Some(&v) => vec![v],
            None => (0..self.s.len()).collect(),
        };
        debug_assert!(!self.p.le(x, z));
        self.assigned[idx] = true;
        for v in choices {
            self.mu[idx] = v;
            if self.consistent(x, z) {
                self.run(order, k + 1, c, visit)?;
                if self.stop {
                    break;
                }
            }
        }
        self.assigned[idx] = false;
        self.mu[idx] = self.s.zero();
        Ok(())
    }
}
