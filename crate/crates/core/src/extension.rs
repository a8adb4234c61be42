//! Relatively complete, interval and covering extensions; interval schemes.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitMatrix;
use crate::element::Element;
use crate::order::{FinitePoset, LatticeTables};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionError {
    #[error("{0} is missing from the larger poset")]
    NotSubset(Element),
    #[error("order between {0} and {1} differs in the larger poset")]
    NotInduced(Element, Element),
    #[error("the extension is not an interval extension")]
    NotInterval,
    #[error("blocks ({0}) overlap or meet the base")]
    Overlap(Element),
    #[error("block key ({0}, {1}) is not a strict pair of the base")]
    BadKey(usize, usize),
}

/// Why an extension kind fails; indices refer to the larger poset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    /// No largest element of the small poset below `x`.
    NoLowerProjection(usize),
    NoUpperProjection(usize),
    /// `x <= y` but neither far apart nor equivalent.
    NotInterval(usize, usize),
    /// Projections of `x` neither equal nor a cover.
    NotCovering(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails(Violation),
    Unchecked,
}

impl Status {
    pub fn holds(&self) -> bool {
        matches!(self, Status::Holds)
    }
}

/// Projection data for `P` inside `Q`. Indices into `Q` unless noted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionWitness {
    /// Position in `Q` of each element of `P`.
    pub embed: Vec<usize>,
    /// Position in `P` of each element of `Q`, if any.
    pub in_sub: Vec<Option<usize>>,
    /// `x_P` as a `Q` index.
    pub lower: Vec<Option<usize>>,
    /// `x^P` as a `Q` index.
    pub upper: Vec<Option<usize>>,
    pub rc: Status,
    pub int: Status,
    pub cov: Status,
}

impl ExtensionWitness {
    pub fn lower(&self, x: usize) -> usize {
        self.lower[x].expect("lower projection defined")
    }

    pub fn upper(&self, x: usize) -> usize {
        self.upper[x].expect("upper projection defined")
    }

    pub fn in_base(&self, x: usize) -> bool {
        self.in_sub[x].is_some()
    }

    /// `x^P <= y_P`.
    pub fn far_below(&self, q: &FinitePoset, x: usize, y: usize) -> bool {
        q.le(self.upper(x), self.lower(y))
    }

    pub fn equivalent(&self, x: usize, y: usize) -> bool {
        self.lower[x] == self.lower[y] && self.upper[x] == self.upper[y]
    }

    pub fn is_rc(&self) -> bool {
        self.rc.holds()
    }

    pub fn is_int(&self) -> bool {
        self.int.holds()
    }

    pub fn is_cov(&self) -> bool {
        self.cov.holds()
    }
}

/// Computes projections and classifies the extension `P <= Q`.
pub fn analyze_extension(p: &FinitePoset, q: &FinitePoset) -> Result<ExtensionWitness, ExtensionError> {
    let mut embed = Vec::with_capacity(p.len());
    for e in p.elements() {
        embed.push(q.index_of(e).ok_or_else(|| ExtensionError::NotSubset(e.clone()))?);
    }
    for i in 0..p.len() {
        for j in 0..p.len() {
            if p.le(i, j) != q.le(embed[i], embed[j]) {
                return Err(ExtensionError::NotInduced(p.element(i).clone(), p.element(j).clone()));
            }
        }
    }
    let mut in_sub = vec![None; q.len()];
    for (i, &x) in embed.iter().enumerate() {
        in_sub[x] = Some(i);
    }
    let n = q.len();
    let mut lower = vec![None; n];
    let mut upper = vec![None; n];
    let mut rc = Status::Holds;
    for x in 0..n {
        let below: Vec<usize> = embed.iter().copied().filter(|&z| q.le(z, x)).collect();
        let above: Vec<usize> = embed.iter().copied().filter(|&z| q.le(x, z)).collect();
        lower[x] = q.max_of(&below);
        upper[x] = q.min_of(&above);
        if rc.holds() {
            if lower[x].is_none() {
                rc = Status::Fails(Violation::NoLowerProjection(x));
            } else if upper[x].is_none() {
                rc = Status::Fails(Violation::NoUpperProjection(x));
            }
        }
    }
    let mut w = ExtensionWitness { embed, in_sub, lower, upper, rc, int: Status::Unchecked, cov: Status::Unchecked };
    if !w.rc.holds() {
        return Ok(w);
    }
    w.int = Status::Holds;
    'outer: for x in 0..n {
        for y in q.up_set(x) {
            if !w.far_below(q, x, y) && !w.equivalent(x, y) {
                w.int = Status::Fails(Violation::NotInterval(x, y));
                break 'outer;
            }
        }
    }
    if !w.int.holds() {
        return Ok(w);
    }
    w.cov = Status::Holds;
    for x in 0..n {
        let (lo, hi) = (w.in_sub[w.lower(x)].unwrap(), w.in_sub[w.upper(x)].unwrap());
        if !p.covers_or_eq(lo, hi) {
            w.cov = Status::Fails(Violation::NotCovering(x));
            break;
        }
    }
    Ok(w)
}

/// A base poset plus pairwise disjoint blocks attached to strict pairs
/// `(a, b)` of base indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalScheme {
    pub base: FinitePoset,
    pub blocks: BTreeMap<(usize, usize), FinitePoset>,
}

/// `P + sum of blocks`: base elements first, then blocks in key order.
pub fn sum_scheme(s: &IntervalScheme) -> Result<(FinitePoset, ExtensionWitness), ExtensionError> {
    let p = &s.base;
    let mut elements: Vec<Element> = p.elements().to_vec();
    // projections as base indices
    let mut lo: Vec<usize> = (0..p.len()).collect();
    let mut hi: Vec<usize> = (0..p.len()).collect();
    let mut seen: BTreeMap<&Element, ()> = p.elements().iter().map(|e| (e, ())).collect();
    for (&(a, b), blk) in &s.blocks {
        if a >= p.len() || b >= p.len() || !p.lt(a, b) {
            return Err(ExtensionError::BadKey(a, b));
        }
        for e in blk.elements() {
            if seen.insert(e, ()).is_some() {
                return Err(ExtensionError::Overlap(e.clone()));
            }
            elements.push(e.clone());
            lo.push(a);
            hi.push(b);
        }
    }
    let n = elements.len();
    // positions of each block's elements in the sum
    let mut start = p.len();
    let mut block_range: Vec<(usize, usize, &FinitePoset)> = Vec::new();
    for blk in s.blocks.values() {
        block_range.push((start, start + blk.len(), blk));
        start += blk.len();
    }
    let mut m = BitMatrix::new(n);
    for x in 0..n {
        for y in 0..n {
            if p.le(hi[x], lo[y]) {
                m.set(x, y, true);
            }
        }
    }
    for &(from, to, blk) in &block_range {
        for x in from..to {
            for y in from..to {
                if blk.le(x - from, y - from) {
                    m.set(x, y, true);
                }
            }
        }
    }
    let q = FinitePoset::from_matrix(elements, m).map_err(|_| ExtensionError::NotInterval)?;
    let w = analyze_extension(p, &q)?;
    debug_assert!(w.is_int());
    Ok((q, w))
}

/// Blocks `{x : x_P = a, x^P = b}`; empty blocks are left out.
pub fn decompose_to_scheme(
    p: &FinitePoset,
    q: &FinitePoset,
    w: &ExtensionWitness,
) -> Result<IntervalScheme, ExtensionError> {
    if !w.is_int() {
        return Err(ExtensionError::NotInterval);
    }
    let mut members: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for x in 0..q.len() {
        if w.in_base(x) {
            continue;
        }
        let a = w.in_sub[w.lower(x)].expect("projection lies in base");
        let b = w.in_sub[w.upper(x)].expect("projection lies in base");
        members.entry((a, b)).or_default().push(x);
    }
    let blocks = members.into_iter().map(|(k, xs)| (k, q.induced(&xs))).collect();
    Ok(IntervalScheme { base: p.clone(), blocks })
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum IntervalLatticeError {
    #[error("not an interval extension")]
    NotInterval,
    #[error("the base is not a lattice")]
    BaseNotLattice,
    /// Closed interval `[a, b]` of `Q` (indices into `Q`) is not a lattice.
    #[error("interval [{0}, {1}] is not a lattice")]
    IntervalNotLattice(usize, usize),
}

/// Lattice tables of `Q` from those of `P` and of the block intervals.
pub fn interval_lattice_ops(
    p: &FinitePoset,
    q: &FinitePoset,
    w: &ExtensionWitness,
) -> Result<LatticeTables, IntervalLatticeError> {
    if !w.is_int() {
        return Err(IntervalLatticeError::NotInterval);
    }
    let pt = p.lattice_ops().ok_or(IntervalLatticeError::BaseNotLattice)?;
    let n = q.len();
    let mut intervals: BTreeMap<(usize, usize), (Vec<usize>, LatticeTables)> = BTreeMap::new();
    for x in 0..n {
        let key = (w.lower(x), w.upper(x));
        if let alloc::collections::btree_map::Entry::Vacant(slot) = intervals.entry(key) {
            let members = q.interval(key.0, key.1);
            let t = q.induced(&members).lattice_ops().ok_or(IntervalLatticeError::IntervalNotLattice(key.0, key.1))?;
            slot.insert((members, t));
        }
    }
    let base_join = |a: usize, b: usize| w.embed[pt.join(w.in_sub[a].unwrap(), w.in_sub[b].unwrap())];
    let base_meet = |a: usize, b: usize| w.embed[pt.meet(w.in_sub[a].unwrap(), w.in_sub[b].unwrap())];
    let mut join = vec![0; n * n];
    let mut meet = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            let (j, m) = if q.le(x, y) {
                (y, x)
            } else if q.le(y, x) {
                (x, y)
            } else if w.equivalent(x, y) {
                let (members, t) = &intervals[&(w.lower(x), w.upper(x))];
                let ix = members.binary_search(&x).unwrap();
                let iy = members.binary_search(&y).unwrap();
                (members[t.join(ix, iy)], members[t.meet(ix, iy)])
            } else {
                (base_join(w.upper(x), w.upper(y)), base_meet(w.lower(x), w.lower(y)))
            };
            join[x * n + y] = j;
            meet[x * n + y] = m;
        }
    }
    Ok(LatticeTables { n, join, meet })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Kinds {
    pub rc: bool,
    pub int: bool,
    pub cov: bool,
}

impl Kinds {
    pub fn of(w: &ExtensionWitness) -> Self {
        Kinds { rc: w.is_rc(), int: w.is_int(), cov: w.is_cov() }
    }
}

/// A composition law that is a theorem but failed on a concrete tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawViolation {
    RcRc,
    IntCov,
    CovCov,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComposeReport {
    pub pq: Kinds,
    pub qr: Kinds,
    pub pr: Kinds,
    /// `P <=int Q <=int R` but not `P <=int R`.
    pub int_int_fails: bool,
    pub violation: Option<LawViolation>,
}

/// Classifies the three extensions of a tower `P <= Q <= R` and checks the
/// laws rc o rc, int o cov and cov o cov.
pub fn compose_check(p: &FinitePoset, q: &FinitePoset, r: &FinitePoset) -> Result<ComposeReport, ExtensionError> {
    let pq = Kinds::of(&analyze_extension(p, q)?);
    let qr = Kinds::of(&analyze_extension(q, r)?);
    let pr = Kinds::of(&analyze_extension(p, r)?);
    let violation = if pq.rc && qr.rc && !pr.rc {
        Some(LawViolation::RcRc)
    } else if pq.int && qr.cov && !pr.int {
        Some(LawViolation::IntCov)
    } else if pq.cov && qr.cov && !pr.cov {
        Some(LawViolation::CovCov)
    } else {
        None
    };
    Ok(ComposeReport { pq, qr, pr, int_int_fails: pq.int && qr.int && !pr.int, violation })
}
