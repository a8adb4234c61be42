//! p-measures, the (P1)-(P3) verifiers, extension and doubling checks, and
//! the extension of a p-measure along an interval extension.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::extension::ExtensionWitness;
use crate::order::FinitePoset;
use crate::semilattice::{FiniteJoinSemilattice, Homomorphism};

/// A poset with a table `mu[x * n + y]` of values in `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMeasuredPoset {
    pub poset: FinitePoset,
    pub target: Arc<FiniteJoinSemilattice>,
    pub mu: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MeasureViolation {
    #[error("table has the wrong size or out-of-range values")]
    Malformed,
    /// `x <= y` but the value at `(x, y)` is nonzero.
    #[error("value at ({0}, {1}) should vanish")]
    Vanishing(usize, usize),
    /// Value at `(x, z)` exceeds the join through `y`.
    #[error("triangle inequality fails at ({0}, {1}, {2})")]
    Triangle(usize, usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("elements {0} and {1} are incomparable")]
pub struct Incomparable(pub usize, pub usize);

impl PMeasuredPoset {
    pub fn new(poset: FinitePoset, target: Arc<FiniteJoinSemilattice>, mu: Vec<usize>) -> Self {
        PMeasuredPoset { poset, target, mu }
    }

    /// The zero measure.
    pub fn zero(poset: FinitePoset, target: Arc<FiniteJoinSemilattice>) -> Self {
        let n = poset.len();
        let z = target.zero();
        PMeasuredPoset { poset, target, mu: vec![z; n * n] }
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize) -> usize {
        self.mu[x * self.len() + y]
    }

    pub fn set(&mut self, x: usize, y: usize, v: usize) {
        let n = self.len();
        self.mu[x * n + y] = v;
    }

    /// Value at `(max, min)` of two comparable elements.
    pub fn distance(&self, x: usize, y: usize) -> Result<usize, Incomparable> {
        if self.poset.le(y, x) {
            Ok(self.value(x, y))
        } else if self.poset.le(x, y) {
            Ok(self.value(y, x))
        } else {
            Err(Incomparable(x, y))
        }
    }

    /// Both axioms by exhaustive scan.
    pub fn validate(&self) -> Result<(), MeasureViolation> {
        let n = self.len();
        let s = &*self.target;
        if self.mu.len() != n * n || self.mu.iter().any(|&v| v >= s.len()) {
            return Err(MeasureViolation::Malformed);
        }
        for x in 0..n {
            for y in self.poset.up_set(x) {
                if self.value(x, y) != s.zero() {
                    return Err(MeasureViolation::Vanishing(x, y));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let xy = self.value(x, y);
                for z in 0..n {
                    if !s.le(self.value(x, z), s.join(xy, self.value(y, z))) {
                        return Err(MeasureViolation::Triangle(x, y, z));
                    }
                }
            }
        }
        Ok(())
    }

    /// Restriction to a subset of elements (indices into `self`).
    pub fn restrict(&self, subset: &[usize]) -> PMeasuredPoset {
        let poset = self.poset.induced(subset);
        let mut mu = Vec::with_capacity(subset.len() * subset.len());
        for &x in subset {
            for &y in subset {
                mu.push(self.value(x, y));
            }
        }
        PMeasuredPoset { poset, target: self.target.clone(), mu }
    }

    /// Image under a homomorphism into `target`.
    pub fn map_values(&self, phi: &Homomorphism, target: Arc<FiniteJoinSemilattice>) -> PMeasuredPoset {
        PMeasuredPoset { poset: self.poset.clone(), target, mu: self.mu.iter().map(|&v| phi.apply(v)).collect() }
    }
}

/// (P1): `u <= v` and zero value at `(v, u)` force `u = v`.
pub fn check_p1(m: &PMeasuredPoset) -> Result<(), (usize, usize)> {
    let z = m.target.zero();
    for u in 0..m.len() {
        for v in m.poset.up_set(u) {
            if v != u && m.value(v, u) == z {
                return Err((u, v));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum P2Mode {
    /// Every `(a, b)` in `S x S`, evaluating the implication.
    All,
    /// Only pairs with the interval value below `a v b`.
    Bounded,
}

/// A failing instance of (P2): interval `[u, v]` and the pair `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct P2Failure {
    pub u: usize,
    pub v: usize,
    pub a: usize,
    pub b: usize,
}

/// Elements reachable from `u` by upward cover steps whose value is below
/// `a` or below `b`.
fn reachable(m: &PMeasuredPoset, u: usize, a: usize, b: usize) -> Vec<bool> {
    let s = &*m.target;
    let mut seen = vec![false; m.len()];
    seen[u] = true;
    let mut queue = VecDeque::new();
    queue.push_back(u);
    while let Some(x) = queue.pop_front() {
        for &y in m.poset.upper_covers(x) {
            let d = m.value(y, x);
            if !seen[y] && (s.le(d, a) || s.le(d, b)) {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

/// (P2) decided by reachability over cover edges. Refining a chain step
/// `x <= y` into covers keeps every step value below the original one, so
/// cover edges suffice and any upward path from `u` to `v` stays in `[u, v]`.
pub fn check_p2(m: &PMeasuredPoset, mode: P2Mode) -> Result<(), P2Failure> {
    let s = &*m.target;
    let n = m.len();
    for u in 0..n {
        for a in 0..s.len() {
            for b in 0..s.len() {
                let ab = s.join(a, b);
                let relevant: Vec<usize> = m.poset.up_set(u).filter(|&v| s.le(m.value(v, u), ab)).collect();
                if mode == P2Mode::Bounded && relevant.is_empty() {
                    continue;
                }
                let seen = reachable(m, u, a, b);
                match mode {
                    P2Mode::All => {
                        for v in m.poset.up_set(u) {
                            let premise = s.le(m.value(v, u), ab);
                            if premise && !seen[v] {
                                return Err(P2Failure { u, v, a, b });
                            }
                        }
                    }
                    P2Mode::Bounded => {
                        if let Some(&v) = relevant.iter().find(|&&v| !seen[v]) {
                            return Err(P2Failure { u, v, a, b });
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum P3Failure {
    #[error("the poset has no least element")]
    NoLeast,
    /// Some element of the target is not generated.
    #[error("element {0} of the target is not generated")]
    NotGenerating(usize),
}

/// (P3): the values at `(x, 0)` generate the target.
pub fn check_p3(m: &PMeasuredPoset) -> Result<(), P3Failure> {
    let zero = m.poset.least().ok_or(P3Failure::NoLeast)?;
    let seed: Vec<usize> = (0..m.len()).map(|x| m.value(x, zero)).collect();
    let gen = m.target.generated_subsemilattice(&seed);
    match (0..m.target.len()).find(|v| !gen.contains(v)) {
        Some(v) => Err(P3Failure::NotGenerating(v)),
        None => Ok(()),
    }
}

/// The values at `(y, x)` for `x <= y` join-generate the target.
pub fn values_generate(m: &PMeasuredPoset) -> bool {
    let mut seed = Vec::new();
    for x in 0..m.len() {
        for y in m.poset.up_set(x) {
            seed.push(m.value(y, x));
        }
    }
    m.target.generated_subsemilattice(&seed).len() == m.target.len()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionMismatch {
    #[error("homomorphism does not match the two targets")]
    TypeMismatch,
    #[error("the smaller poset is not induced in the larger one")]
    NotInduced,
    /// Indices into the smaller poset.
    #[error("values at ({0}, {1}) disagree")]
    Value(usize, usize),
}

/// `mu_super(x, y) = phi(mu_sub(x, y))` on all pairs of the smaller poset.
pub fn check_extension(
    sub: &PMeasuredPoset,
    sup: &PMeasuredPoset,
    phi: &Homomorphism,
) -> Result<(), ExtensionMismatch> {
    if phi.map.len() != sub.target.len() || phi.map.iter().any(|&v| v >= sup.target.len()) {
        return Err(ExtensionMismatch::TypeMismatch);
    }
    if !sub.poset.is_induced_in(&sup.poset) {
        return Err(ExtensionMismatch::NotInduced);
    }
    let emb = sub.poset.embedding_into(&sup.poset).expect("induced");
    for x in 0..sub.len() {
        for y in 0..sub.len() {
            if sup.value(emb[x], emb[y]) != phi.apply(sub.value(x, y)) {
                return Err(ExtensionMismatch::Value(x, y));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DoublingError {
    #[error("the extension is not relatively complete")]
    NotRc,
    /// Index into the larger poset.
    #[error("element {0} is not doubled")]
    NotDoubled(usize),
    #[error("the two formulations disagree at {0}")]
    Disagree(usize),
}

/// Doubling: the distances from `x` down to `x_P` and up to `x^P` are
/// comparable, equivalently one of them equals the distance across.
pub fn check_doubling(sup: &PMeasuredPoset, w: &ExtensionWitness) -> Result<(), DoublingError> {
    if !w.is_rc() {
        return Err(DoublingError::NotRc);
    }
    let s = &*sup.target;
    for x in 0..sup.len() {
        let (lo, hi) = (w.lower(x), w.upper(x));
        let down = sup.value(x, lo);
        let up = sup.value(hi, x);
        let across = sup.value(hi, lo);
        let comparable = s.le(down, up) || s.le(up, down);
        let absorbed = across == down || across == up;
        if comparable != absorbed {
            return Err(DoublingError::Disagree(x));
        }
        if !comparable {
            return Err(DoublingError::NotDoubled(x));
        }
    }
    Ok(())
}

/// Data for extending a p-measure from `P` to an interval extension `Q`.
///
/// `blocks[(a, b)]` (keys are `P` indices) measures the block closure
/// `{a, b} + {x : x_P = a, x^P = b}`; its elements must be those of `Q`.
#[derive(Clone, Debug)]
pub struct IntervalMeasureFamily {
    pub base: PMeasuredPoset,
    pub sup: FinitePoset,
    pub witness: ExtensionWitness,
    pub blocks: BTreeMap<(usize, usize), PMeasuredPoset>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtendError {
    #[error("the extension is not an interval extension")]
    NotInterval,
    #[error("the target is not a distributive lattice")]
    TargetNotDistributive,
    #[error("block ({0}, {1}) is missing")]
    MissingBlock(usize, usize),
    #[error("block ({0}, {1}) does not match the extension")]
    BadBlock(usize, usize),
    #[error("block ({0}, {1}) disagrees with the base on its endpoints")]
    Incompatible(usize, usize),
}

struct BlockView<'a> {
    m: &'a PMeasuredPoset,
    /// `Q` index to block index.
    local: BTreeMap<usize, usize>,
}

/// Extends `base` to `sup` so that it agrees with every block measure.
/// For `x`, `y` in one block the block value is used; otherwise the value is
/// the meet of four terms built from projections and in-block distances.
pub fn extend_measure_to_interval_extension(f: &IntervalMeasureFamily) -> Result<PMeasuredPoset, ExtendError> {
    let w = &f.witness;
    if !w.is_int() {
        return Err(ExtendError::NotInterval);
    }
    let s = &*f.base.target;
    if !s.is_distributive() {
        return Err(ExtendError::TargetNotDistributive);
    }
    let q = &f.sup;
    let n = q.len();
    let mut views: BTreeMap<(usize, usize), BlockView<'_>> = BTreeMap::new();
    for x in 0..n {
        if w.in_base(x) {
            continue;
        }
        let (lo, hi) = (w.lower(x), w.upper(x));
        let key = (w.in_sub[lo].unwrap(), w.in_sub[hi].unwrap());
        if views.contains_key(&key) {
            continue;
        }
        let m = f.blocks.get(&key).ok_or(ExtendError::MissingBlock(key.0, key.1))?;
        if m.target != f.base.target {
            return Err(ExtendError::BadBlock(key.0, key.1));
        }
        let mut local = BTreeMap::new();
        for (i, e) in m.poset.elements().iter().enumerate() {
            let qi = q.index_of(e).ok_or(ExtendError::BadBlock(key.0, key.1))?;
            local.insert(qi, i);
        }
        let (Some(&la), Some(&lb)) = (local.get(&lo), local.get(&hi)) else {
            return Err(ExtendError::BadBlock(key.0, key.1));
        };
        if m.value(lb, la) != f.base.value(key.1, key.0) {
            return Err(ExtendError::Incompatible(key.0, key.1));
        }
        views.insert(key, BlockView { m, local });
    }
    let zero = s.zero();
    let key_of = |x: usize| (w.in_sub[w.lower(x)].unwrap(), w.in_sub[w.upper(x)].unwrap());
    // distances to the projections, inside the block closure
    let mut down = vec![zero; n];
    let mut up = vec![zero; n];
    for x in 0..n {
        if w.in_base(x) {
            continue;
        }
        let v = &views[&key_of(x)];
        let lx = v.local[&x];
        down[x] = v.m.value(lx, v.local[&w.lower(x)]);
        up[x] = v.m.value(v.local[&w.upper(x)], lx);
    }
    let pv = |a: usize, b: usize| f.base.value(w.in_sub[a].unwrap(), w.in_sub[b].unwrap());
    let mut mu = vec![zero; n * n];
    for x in 0..n {
        for y in 0..n {
            let val = if !w.in_base(x) && w.equivalent(x, y) {
                let v = &views[&key_of(x)];
                v.m.value(v.local[&x], v.local[&y])
            } else if w.in_base(x) && w.in_base(y) {
                pv(x, y)
            } else {
                let (xl, xu, yl, yu) = (w.lower(x), w.upper(x), w.lower(y), w.upper(y));
                let t1 = pv(xu, yl);
                let t2 = s.join(pv(xl, yl), down[x]);
                let t3 = s.join(pv(xu, yu), up[y]);
                let t4 = s.join(s.join(pv(xl, yu), down[x]), up[y]);
                s.meet(s.meet(t1, t2), s.meet(t3, t4))
            };
            mu[x * n + y] = val;
        }
    }
    Ok(PMeasuredPoset { poset: q.clone(), target: f.base.target.clone(), mu })
}

/// Which bound failed in [`check_sandwich`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sandwich {
    /// `(x_P, y) <= (x, y) <= (x^P, y)`
    ProjectLeft,
    /// `(x, y^P) <= (x, y) <= (x, y_P)`
    ProjectRight,
    /// `(x, y) <= (x_P, y) v (x, x_P)`
    LeftStep,
    /// `(x, y) <= (x, y^P) v (y^P, y)`
    RightStep,
    /// `(x^P, y) <= (x^P, x) v (x, y)`
    UpperDetour,
    /// `(x, y_P) <= (y, y_P) v (x, y)`
    LowerDetour,
}

/// Pointwise bounds relating values on `Q` to values at projections into
/// `P`, for a measure on an interval extension.
pub fn check_sandwich(q: &PMeasuredPoset, w: &ExtensionWitness) -> Result<(), (usize, usize, Sandwich)> {
    let s = &*q.target;
    let v = |a: usize, b: usize| q.value(a, b);
    for x in 0..q.len() {
        let (xl, xu) = (w.lower(x), w.upper(x));
        for y in 0..q.len() {
            let (yl, yu) = (w.lower(y), w.upper(y));
            let xy = v(x, y);
            let checks = [
                (s.le(v(xl, y), xy) && s.le(xy, v(xu, y)), Sandwich::ProjectLeft),
                (s.le(v(x, yu), xy) && s.le(xy, v(x, yl)), Sandwich::ProjectRight),
                (s.le(xy, s.join(v(xl, y), v(x, xl))), Sandwich::LeftStep),
                (s.le(xy, s.join(v(x, yu), v(yu, y))), Sandwich::RightStep),
                (s.le(v(xu, y), s.join(v(xu, x), xy)), Sandwich::UpperDetour),
                (s.le(v(x, yl), s.join(v(y, yl), xy)), Sandwich::LowerDetour),
            ];
            if let Some(&(_, which)) = checks.iter().find(|c| !c.0) {
                return Err((x, y, which));
            }
        }
    }
    Ok(())
}
