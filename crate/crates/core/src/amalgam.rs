//! Normal diagrams of p-measured posets, their strong amalgam, the valuation
//! and bullet elements, the doubling conditions and the amalgam p-measure.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitMatrix;
use crate::diagram::SemilatticeDiagram;
use crate::element::Element;
use crate::extension::analyze_extension;
use crate::measure::{check_doubling, check_extension, PMeasuredPoset};
use crate::order::{FinitePoset, LatticeTables};
use crate::semilattice::FiniteJoinSemilattice;

/// A diagram of semilattices together with p-measured posets on a
/// down-closed set of indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasuredDiagram {
    pub diagram: SemilatticeDiagram,
    pub blocks: BTreeMap<usize, PMeasuredPoset>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NormalViolation {
    #[error("block indices are not down-closed: {0} present but {1} missing")]
    NotDownClosed(usize, usize),
    #[error("block {0} is not measured in its diagram object")]
    TargetMismatch(usize),
    #[error("block {0} is not an induced sub-poset of block {1}")]
    NotInduced(usize, usize),
    #[error("blocks {0} and {1} intersect outside their meet block at {2}")]
    Intersection(usize, usize, Element),
    #[error("no interpolant in block meet of {0}, {1} for {2} <= {3}")]
    Interpolation(usize, usize, Element, Element),
    #[error("block {1} is not an interval extension of block {0}")]
    NotInterval(usize, usize),
    #[error("block {1} does not extend block {0}: values at ({2}, {3})")]
    Extension(usize, usize, Element, Element),
}

/// Outcome of each group of conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalReport {
    pub normal: Result<(), NormalViolation>,
    pub interval: Result<(), NormalViolation>,
    pub extension: Result<(), NormalViolation>,
}

impl NormalReport {
    pub fn all_ok(&self) -> bool {
        self.normal.is_ok() && self.interval.is_ok() && self.extension.is_ok()
    }

    pub fn first_error(&self) -> Option<&NormalViolation> {
        [&self.normal, &self.interval, &self.extension].into_iter().find_map(|r| r.as_ref().err())
    }
}

impl MeasuredDiagram {
    pub fn new(diagram: SemilatticeDiagram) -> Self {
        MeasuredDiagram { diagram, blocks: BTreeMap::new() }
    }

    pub fn block(&self, i: usize) -> &PMeasuredPoset {
        &self.blocks[&i]
    }

    pub fn keys(&self) -> Vec<usize> {
        self.blocks.keys().copied().collect()
    }

    /// Blocks at indices strictly below `top`.
    pub fn restrict_below(&self, top: usize) -> MeasuredDiagram {
        let ix = &self.diagram.index;
        let blocks = self.blocks.iter().filter(|(&i, _)| ix.lt(i, top)).map(|(&i, b)| (i, b.clone())).collect();
        MeasuredDiagram { diagram: self.diagram.clone(), blocks }
    }

    /// Blocks at indices below or equal to `top`.
    pub fn restrict_to_ideal(&self, top: usize) -> MeasuredDiagram {
        let ix = &self.diagram.index;
        let blocks = self.blocks.iter().filter(|(&i, _)| ix.le(i, top)).map(|(&i, b)| (i, b.clone())).collect();
        MeasuredDiagram { diagram: self.diagram.clone(), blocks }
    }
}

/// Checks the normal diagram conditions, interval normality and the
/// measure extension identities along every transition.
pub fn validate_normal_diagram(md: &MeasuredDiagram) -> NormalReport {
    let normal = check_normal(md);
    let (interval, extension) = if normal.is_ok() {
        (check_interval(md), check_measure_extension(md))
    } else {
        (Ok(()), Ok(()))
    };
    NormalReport { normal, interval, extension }
}

fn check_normal(md: &MeasuredDiagram) -> Result<(), NormalViolation> {
    let ix = &md.diagram.index;
    let keys = md.keys();
    for &k in &keys {
        for i in 0..ix.len() {
            if ix.le(i, k) && !md.blocks.contains_key(&i) {
                return Err(NormalViolation::NotDownClosed(k, i));
            }
        }
        if *md.blocks[&k].target != md.diagram.objects[k] {
            return Err(NormalViolation::TargetMismatch(k));
        }
    }
    for &i in &keys {
        for &j in &keys {
            if ix.le(i, j) && !md.blocks[&i].poset.is_induced_in(&md.blocks[&j].poset) {
                return Err(NormalViolation::NotInduced(i, j));
            }
        }
    }
    for (a, &i) in keys.iter().enumerate() {
        for &j in &keys[a + 1..] {
            let m = ix.meet(i, j);
            let (qi, qj, qm) = (&md.blocks[&i].poset, &md.blocks[&j].poset, &md.blocks[&m].poset);
            for e in qi.elements() {
                if qj.contains(e) != qm.contains(e) {
                    return Err(NormalViolation::Intersection(i, j, e.clone()));
                }
            }
            for e in qm.elements() {
                if !qi.contains(e) || !qj.contains(e) {
                    return Err(NormalViolation::Intersection(i, j, e.clone()));
                }
            }
        }
    }
    for &k in &keys {
        let qk = &md.blocks[&k].poset;
        for &i in &keys {
            if !ix.le(i, k) {
                continue;
            }
            for &j in &keys {
                if !ix.le(j, k) || ix.le(i, j) || ix.le(j, i) {
                    // comparable indices interpolate through x or y itself
                    continue;
                }
                let m = ix.meet(i, j);
                let (qi, qj, qm) = (&md.blocks[&i].poset, &md.blocks[&j].poset, &md.blocks[&m].poset);
                for (xi, x) in qi.elements().iter().enumerate() {
                    let xk = qk.index_of(x).unwrap();
                    for (yj, y) in qj.elements().iter().enumerate() {
                        if !qk.le(xk, qk.index_of(y).unwrap()) {
                            continue;
                        }
                        let found = qm.elements().iter().any(|z| {
                            qi.le(xi, qi.index_of(z).unwrap()) && qj.le(qj.index_of(z).unwrap(), yj)
                        });
                        if !found {
                            return Err(NormalViolation::Interpolation(i, j, x.clone(), y.clone()));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_interval(md: &MeasuredDiagram) -> Result<(), NormalViolation> {
    let ix = &md.diagram.index;
    for (&i, bi) in &md.blocks {
        for (&j, bj) in &md.blocks {
            if i != j && ix.le(i, j) {
                let w = analyze_extension(&bi.poset, &bj.poset).map_err(|_| NormalViolation::NotInduced(i, j))?;
                if !w.is_int() {
                    return Err(NormalViolation::NotInterval(i, j));
                }
            }
        }
    }
    Ok(())
}

fn check_measure_extension(md: &MeasuredDiagram) -> Result<(), NormalViolation> {
    let ix = &md.diagram.index;
    for (&i, bi) in &md.blocks {
        for (&j, bj) in &md.blocks {
            if ix.le(i, j) {
                match check_extension(bi, bj, md.diagram.phi(i, j)) {
                    Ok(()) => {}
                    Err(crate::measure::ExtensionMismatch::Value(x, y)) => {
                        return Err(NormalViolation::Extension(
                            i,
                            j,
                            bi.poset.element(x).clone(),
                            bi.poset.element(y).clone(),
                        ))
                    }
                    Err(_) => return Err(NormalViolation::NotInduced(i, j)),
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AmalgamError {
    #[error("no blocks to amalgamate")]
    NoBlocks,
    #[error("index {0} is not usable as a top")]
    BadTop(usize),
    #[error("diagram is not normal: {0}")]
    NotNormal(NormalViolation),
    #[error("amalgam relation is not a partial order")]
    NotPoset,
    #[error("value at ({0}, {1}) depends on the block used")]
    IllDefined(Element, Element),
    #[error("{0} lies in neither doubling class")]
    NotDoubled(Element),
    #[error("bullets of {0} do not exist")]
    NoBullets(Element),
    #[error("doubling conditions fail: {0}")]
    Doubling(DbViolation),
    #[error("target of the top index is not a distributive lattice")]
    TargetNotDistributive,
    #[error("adjoined top survives at ({0}, {1})")]
    TopInOutput(Element, Element),
}

/// The strong amalgam of the blocks of a diagram below `top` (all blocks if
/// `top` is `None`), with valuation and bullets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongAmalgam {
    pub top: Option<usize>,
    /// Block indices used, sorted by height.
    pub members: Vec<usize>,
    /// Block at the least index.
    pub base: usize,
    pub carrier: FinitePoset,
    /// For each block, carrier position of each of its elements.
    pub blocks: BTreeMap<usize, Vec<usize>>,
    /// For each block, local position of each carrier element.
    pub local: BTreeMap<usize, Vec<Option<usize>>>,
    pub nu: Vec<usize>,
    pub rho: Vec<usize>,
    /// `(lower, upper)` bullets for elements off the base block.
    pub bullets: Vec<Option<(usize, usize)>>,
}

impl StrongAmalgam {
    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn in_block(&self, i: usize, x: usize) -> bool {
        self.local[&i][x].is_some()
    }

    pub fn lower_bullet(&self, x: usize) -> Option<usize> {
        self.bullets[x].map(|b| b.0)
    }

    pub fn upper_bullet(&self, x: usize) -> Option<usize> {
        self.bullets[x].map(|b| b.1)
    }

    /// Largest element of block `i` below `x`.
    pub fn lower_projection(&self, i: usize, x: usize) -> Option<usize> {
        let below: Vec<usize> = self.blocks[&i].iter().copied().filter(|&z| self.carrier.le(z, x)).collect();
        self.carrier.max_of(&below)
    }

    pub fn upper_projection(&self, i: usize, x: usize) -> Option<usize> {
        let above: Vec<usize> = self.blocks[&i].iter().copied().filter(|&z| self.carrier.le(x, z)).collect();
        self.carrier.min_of(&above)
    }
}

/// Builds the carrier order: `x <= y` iff some `z` in the block at
/// `nu(x) ^ nu(y)` has `x <= z` in the block of `x` and `z <= y` in the block
/// of `y`.
pub fn amalgam_order(md: &MeasuredDiagram, top: Option<usize>) -> Result<StrongAmalgam, AmalgamError> {
    let ix = &md.diagram.index;
    let mut members: Vec<usize> = match top {
        Some(t) => {
            if t >= ix.len() {
                return Err(AmalgamError::BadTop(t));
            }
            md.blocks.keys().copied().filter(|&i| ix.lt(i, t)).collect()
        }
        None => md.blocks.keys().copied().collect(),
    };
    if members.is_empty() {
        return Err(AmalgamError::NoBlocks);
    }
    members.sort_by_key(|&i| (ix.height(i), i));
    let sub = MeasuredDiagram {
        diagram: md.diagram.clone(),
        blocks: members.iter().map(|&i| (i, md.blocks[&i].clone())).collect(),
    };
    check_normal(&sub).map_err(AmalgamError::NotNormal)?;
    let base = members[0];

    let mut elements: Vec<Element> = Vec::new();
    let mut position: BTreeMap<&Element, usize> = BTreeMap::new();
    for &i in &members {
        for e in md.blocks[&i].poset.elements() {
            if !position.contains_key(e) {
                position.insert(e, elements.len());
                elements.push(e.clone());
            }
        }
    }
    let n = elements.len();
    let mut blocks = BTreeMap::new();
    let mut local = BTreeMap::new();
    for &i in &members {
        let q = &md.blocks[&i].poset;
        let pos: Vec<usize> = q.elements().iter().map(|e| position[e]).collect();
        let mut back = vec![None; n];
        for (l, &g) in pos.iter().enumerate() {
            back[g] = Some(l);
        }
        blocks.insert(i, pos);
        local.insert(i, back);
    }
    let mut nu = vec![0; n];
    for x in 0..n {
        let mut v: Option<usize> = None;
        for &i in &members {
            if local[&i][x].is_some() {
                v = Some(match v {
                    None => i,
                    Some(w) => ix.meet(w, i),
                });
            }
        }
        nu[x] = v.expect("every element lies in a block");
    }
    let mut le = BitMatrix::new(n);
    for x in 0..n {
        for y in 0..n {
            let (i, j) = (nu[x], nu[y]);
            let related = if ix.le(i, j) {
                let q = &md.blocks[&j].poset;
                q.le(local[&j][x].unwrap(), local[&j][y].unwrap())
            } else if ix.le(j, i) {
                let q = &md.blocks[&i].poset;
                q.le(local[&i][x].unwrap(), local[&i][y].unwrap())
            } else {
                interpolates(md, &local, &blocks, ix.meet(i, j), i, j, x, y)
            };
            if related {
                le.set(x, y, true);
            }
        }
    }
    for x in 0..n {
        for y in le.row_iter(x).collect::<Vec<_>>() {
            if x != y && le.get(y, x) {
                return Err(AmalgamError::NotPoset);
            }
            if !le.row_contains(x, y) {
                return Err(AmalgamError::NotPoset);
            }
        }
    }
    let carrier = FinitePoset::from_matrix(elements, le).map_err(|_| AmalgamError::NotPoset)?;
    let rho = nu.iter().map(|&i| ix.height(i)).collect();
    let mut a = StrongAmalgam { top, members, base, carrier, blocks, local, nu, rho, bullets: vec![None; n] };
    a.bullets = (0..n).map(|x| find_bullets(&a, md, x)).collect();
    Ok(a)
}

#[allow(clippy::too_many_arguments)]
fn interpolates(
    md: &MeasuredDiagram,
    local: &BTreeMap<usize, Vec<Option<usize>>>,
    blocks: &BTreeMap<usize, Vec<usize>>,
    m: usize,
    i: usize,
    j: usize,
    x: usize,
    y: usize,
) -> bool {
    let (qi, qj) = (&md.blocks[&i].poset, &md.blocks[&j].poset);
    let (li, lj) = (&local[&i], &local[&j]);
    let (xi, yj) = (li[x].unwrap(), lj[y].unwrap());
    blocks[&m].iter().any(|&z| qi.le(xi, li[z].unwrap()) && qj.le(lj[z].unwrap(), yj))
}

fn find_bullets(a: &StrongAmalgam, md: &MeasuredDiagram, x: usize) -> Option<(usize, usize)> {
    let ix = &md.diagram.index;
    if a.nu[x] == a.base {
        return None;
    }
    let p = &a.carrier;
    let below: Vec<usize> = (0..a.len()).filter(|&z| p.lt(z, x) && ix.lt(a.nu[z], a.nu[x])).collect();
    let above: Vec<usize> = (0..a.len()).filter(|&z| p.lt(x, z) && ix.lt(a.nu[z], a.nu[x])).collect();
    Some((p.max_of(&below)?, p.min_of(&above)?))
}

/// Evaluates the order criterion with every admissible pair of blocks and
/// reports the first pair of elements where the answers differ.
pub fn check_order_independence(md: &MeasuredDiagram, a: &StrongAmalgam) -> Result<(), (usize, usize)> {
    let ix = &md.diagram.index;
    for x in 0..a.len() {
        for y in 0..a.len() {
            let expected = a.carrier.le(x, y);
            for &i in &a.members {
                if !a.in_block(i, x) {
                    continue;
                }
                for &j in &a.members {
                    if !a.in_block(j, y) {
                        continue;
                    }
                    if interpolates(md, &a.local, &a.blocks, ix.meet(i, j), i, j, x, y) != expected {
                        return Err((x, y));
                    }
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AmalgamLatticeError {
    #[error("block {0} is not a lattice")]
    BlockNotLattice(usize),
    #[error("recipe and direct computation differ at ({0}, {1})")]
    Mismatch(usize, usize),
    #[error("join or meet of ({0}, {1}) leaves the meet block")]
    OutsideMeetBlock(usize, usize),
    #[error("the amalgam is not a lattice")]
    NotLattice,
}

/// Join and meet tables from block operations: for incomparable `a`, `b`
/// the meet is the meet, in the block at `nu(a) ^ nu(b)`, of the lower
/// projections of `a` and `b` to that block (dually for joins). The result
/// is compared with a direct computation on the carrier.
pub fn amalgam_lattice_ops(md: &MeasuredDiagram, a: &StrongAmalgam) -> Result<LatticeTables, AmalgamLatticeError> {
    let ix = &md.diagram.index;
    let mut tables = BTreeMap::new();
    for &i in &a.members {
        let t = md.blocks[&i].poset.lattice_ops().ok_or(AmalgamLatticeError::BlockNotLattice(i))?;
        tables.insert(i, t);
    }
    let n = a.len();
    let p = &a.carrier;
    let mut join = vec![0; n * n];
    let mut meet = vec![0; n * n];
    for x in 0..n {
        for y in 0..n {
            let (j, m) = if p.le(x, y) {
                (y, x)
            } else if p.le(y, x) {
                (x, y)
            } else {
                let k = ix.meet(a.nu[x], a.nu[y]);
                let t = &tables[&k];
                let loc = |z: usize| a.local[&k][z].unwrap();
                let lx = a.lower_projection(k, x).ok_or(AmalgamLatticeError::NotLattice)?;
                let ly = a.lower_projection(k, y).ok_or(AmalgamLatticeError::NotLattice)?;
                let ux = a.upper_projection(k, x).ok_or(AmalgamLatticeError::NotLattice)?;
                let uy = a.upper_projection(k, y).ok_or(AmalgamLatticeError::NotLattice)?;
                let blk = &a.blocks[&k];
                (blk[t.join(loc(ux), loc(uy))], blk[t.meet(loc(lx), loc(ly))])
            };
            join[x * n + y] = j;
            meet[x * n + y] = m;
        }
    }
    let direct = p.lattice_ops().ok_or(AmalgamLatticeError::NotLattice)?;
    for x in 0..n {
        for y in 0..n {
            if direct.join(x, y) != join[x * n + y] || direct.meet(x, y) != meet[x * n + y] {
                return Err(AmalgamLatticeError::Mismatch(x, y));
            }
            if !p.comparable(x, y) {
                let k = ix.meet(a.nu[x], a.nu[y]);
                if !a.in_block(k, join[x * n + y]) || !a.in_block(k, meet[x * n + y]) {
                    return Err(AmalgamLatticeError::OutsideMeetBlock(x, y));
                }
            }
        }
    }
    Ok(LatticeTables { n, join, meet })
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BulletViolation {
    #[error("bullets of {0} do not exist")]
    Missing(usize),
    #[error("valuations of the bullets of {0} are incomparable")]
    Incomparable(usize),
    #[error("bullets of {0} are not its projections")]
    NotProjection(usize),
    #[error("bullets of {0} fail to separate it from {1}")]
    Separation(usize, usize),
}

/// Checks existence of bullets off the base block and their three
/// properties: comparable valuations, agreement with projections on the
/// larger of the two blocks, and separation from elements of incomparable or
/// lower valuation.
pub fn compute_bullets(md: &MeasuredDiagram, a: &StrongAmalgam) -> Result<(), BulletViolation> {
    let ix = &md.diagram.index;
    let p = &a.carrier;
    for x in 0..a.len() {
        if a.nu[x] == a.base {
            continue;
        }
        let (lo, hi) = a.bullets[x].ok_or(BulletViolation::Missing(x))?;
        let (vl, vh) = (a.nu[lo], a.nu[hi]);
        if !ix.le(vl, vh) && !ix.le(vh, vl) {
            return Err(BulletViolation::Incomparable(x));
        }
        let i = if ix.le(vl, vh) { vh } else { vl };
        if a.lower_projection(i, x) != Some(lo) || a.upper_projection(i, x) != Some(hi) {
            return Err(BulletViolation::NotProjection(x));
        }
        for y in 0..a.len() {
            if ix.le(a.nu[x], a.nu[y]) {
                continue;
            }
            if p.le(x, y) && !p.le(hi, y) {
                return Err(BulletViolation::Separation(x, y));
            }
            if p.le(y, x) && !p.le(y, lo) {
                return Err(BulletViolation::Separation(x, y));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DbViolation {
    #[error("block {1} is not a doubling extension of block {0} at {2}")]
    NotDoubling(usize, usize, Element),
    #[error("replacement by the upper bullet fails in block {0} at ({1}, {2})")]
    Upper(usize, Element, Element),
    #[error("replacement by the lower bullet fails in block {0} at ({1}, {2})")]
    Lower(usize, Element, Element),
    #[error("bullets are unavailable: {0}")]
    Bullets(alloc::boxed::Box<AmalgamError>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DbReport {
    pub db1: Result<(), DbViolation>,
    pub db2: Result<(), DbViolation>,
    /// Second condition checked on incomparable pairs only.
    pub db2_incomparable: Result<(), DbViolation>,
}

impl DbReport {
    pub fn all_ok(&self) -> bool {
        self.db1.is_ok() && self.db2.is_ok() && self.db2_incomparable.is_ok()
    }

    pub fn first_error(&self) -> Option<&DbViolation> {
        [&self.db1, &self.db2, &self.db2_incomparable].into_iter().find_map(|r| r.as_ref().err())
    }
}

pub fn check_db1_db2(md: &MeasuredDiagram) -> DbReport {
    let db1 = check_db1(md);
    let (db2, db2_incomparable) = match amalgam_order(md, None) {
        Ok(a) => (check_db2(md, &a, false), check_db2(md, &a, true)),
        Err(e) => (Err(DbViolation::Bullets(e.clone().into())), Err(DbViolation::Bullets(e.into()))),
    };
    DbReport { db1, db2, db2_incomparable }
}

fn check_db1(md: &MeasuredDiagram) -> Result<(), DbViolation> {
    let ix = &md.diagram.index;
    for (&i, bi) in &md.blocks {
        for (&j, bj) in &md.blocks {
            if i == j || !ix.le(i, j) {
                continue;
            }
            let w = analyze_extension(&bi.poset, &bj.poset)
                .map_err(|_| DbViolation::NotDoubling(i, j, bj.poset.element(0).clone()))?;
            if let Err(e) = check_doubling(bj, &w) {
                let x = match e {
                    crate::measure::DoublingError::NotDoubled(x) | crate::measure::DoublingError::Disagree(x) => x,
                    crate::measure::DoublingError::NotRc => 0,
                };
                return Err(DbViolation::NotDoubling(i, j, bj.poset.element(x).clone()));
            }
        }
    }
    Ok(())
}

fn check_db2(md: &MeasuredDiagram, a: &StrongAmalgam, incomparable_only: bool) -> Result<(), DbViolation> {
    let ix = &md.diagram.index;
    for (&i, q) in &md.blocks {
        let glob = &a.blocks[&i];
        let loc = &a.local[&i];
        for x in 0..q.len() {
            let gx = glob[x];
            let Some((glo, ghi)) = a.bullets[gx] else {
                if a.nu[gx] != a.base {
                    return Err(DbViolation::Bullets(AmalgamError::NoBullets(q.poset.element(x).clone()).into()));
                }
                continue;
            };
            let (lo, hi) = (loc[glo].unwrap(), loc[ghi].unwrap());
            let across = q.value(hi, lo);
            let plus = q.value(x, lo) == across;
            let minus = q.value(hi, x) == across;
            for y in 0..q.len() {
                let gy = glob[y];
                if ix.le(a.nu[gx], a.nu[gy]) {
                    continue;
                }
                if incomparable_only && q.poset.comparable(x, y) {
                    continue;
                }
                if plus && q.value(x, y) != q.value(hi, y) {
                    return Err(DbViolation::Upper(i, q.poset.element(x).clone(), q.poset.element(y).clone()));
                }
                if minus && q.value(y, x) != q.value(y, lo) {
                    return Err(DbViolation::Lower(i, q.poset.element(x).clone(), q.poset.element(y).clone()));
                }
            }
        }
    }
    Ok(())
}

/// An element of `D` or the adjoined top.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Capped {
    Value(usize),
    Top,
}

impl Capped {
    pub fn join(self, other: Capped, d: &FiniteJoinSemilattice) -> Capped {
        match (self, other) {
            (Capped::Value(a), Capped::Value(b)) => Capped::Value(d.join(a, b)),
            _ => Capped::Top,
        }
    }

    pub fn meet(self, other: Capped, d: &FiniteJoinSemilattice) -> Capped {
        match (self, other) {
            (Capped::Value(a), Capped::Value(b)) => Capped::Value(d.meet(a, b)),
            (Capped::Top, x) | (x, Capped::Top) => x,
        }
    }

    pub fn le(self, other: Capped, d: &FiniteJoinSemilattice) -> bool {
        match (self, other) {
            (_, Capped::Top) => true,
            (Capped::Top, Capped::Value(_)) => false,
            (Capped::Value(a), Capped::Value(b)) => d.le(a, b),
        }
    }

    pub fn value(self) -> Option<usize> {
        match self {
            Capped::Value(v) => Some(v),
            Capped::Top => None,
        }
    }
}

/// Values of the amalgam below a chosen top index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamMeasure {
    pub level: usize,
    /// Block values pushed to the top index, or the adjoined top.
    pub bvo: Vec<Capped>,
    pub oplus: Vec<bool>,
    pub ominus: Vec<bool>,
    pub measured: PMeasuredPoset,
}

impl AmalgamMeasure {
    pub fn bvo(&self, x: usize, y: usize) -> Capped {
        self.bvo[x * self.measured.len() + y]
    }

    pub fn value(&self, x: usize, y: usize) -> usize {
        self.measured.value(x, y)
    }

    pub fn target(&self) -> &FiniteJoinSemilattice {
        &self.measured.target
    }
}

/// Block values pushed to level `level`; well-definedness is checked over
/// every block containing both elements.
pub fn compute_bvo(md: &MeasuredDiagram, a: &StrongAmalgam, level: usize) -> Result<Vec<Capped>, AmalgamError> {
    let ix = &md.diagram.index;
    let n = a.len();
    let mut bvo = vec![Capped::Top; n * n];
    for x in 0..n {
        for y in 0..n {
            let mut val: Option<usize> = None;
            for &i in &a.members {
                if !ix.le(a.nu[x], i) || !ix.le(a.nu[y], i) {
                    continue;
                }
                let q = &md.blocks[&i];
                let loc = &a.local[&i];
                let v = md.diagram.phi(i, level).apply(q.value(loc[x].unwrap(), loc[y].unwrap()));
                match val {
                    None => val = Some(v),
                    Some(w) if w != v => {
                        return Err(AmalgamError::IllDefined(
                            a.carrier.element(x).clone(),
                            a.carrier.element(y).clone(),
                        ))
                    }
                    _ => {}
                }
            }
            if let Some(v) = val {
                bvo[x * n + y] = Capped::Value(v);
            }
        }
    }
    Ok(bvo)
}

/// The p-measure on the strong amalgam of the blocks below `level`.
///
/// Requires the doubling conditions on those blocks. `bvo` is refined by
/// three meets: through elements of smaller valuation than `y`, through
/// elements of smaller valuation than `x`, and through pairs `(u, v)` with `u`
/// in the lower doubling class below `x` and `v` in the upper one below `y`.
pub fn amalgam_measure(md: &MeasuredDiagram, a: &StrongAmalgam, level: usize) -> Result<AmalgamMeasure, AmalgamError> {
    amalgam_measure_with(md, a, level, true)
}

/// Same as [`amalgam_measure`]; `restricted` skips terms that are known to
/// be the adjoined top instead of folding them in.
pub fn amalgam_measure_with(
    md: &MeasuredDiagram,
    a: &StrongAmalgam,
    level: usize,
    restricted: bool,
) -> Result<AmalgamMeasure, AmalgamError> {
    if a.top != Some(level) {
        return Err(AmalgamError::BadTop(level));
    }
    let below = md.restrict_below(level);
    let db = check_db1_db2(&below);
    if let Some(e) = db.first_error() {
        return Err(AmalgamError::Doubling(e.clone()));
    }
    let d = Arc::new(md.diagram.objects[level].clone());
    if !d.is_distributive() {
        return Err(AmalgamError::TargetNotDistributive);
    }
    let ix = &md.diagram.index;
    let bvo = compute_bvo(md, a, level)?;
    let n = a.len();
    let at = |x: usize, y: usize| bvo[x * n + y];
    let mut oplus = vec![false; n];
    let mut ominus = vec![false; n];
    for x in 0..n {
        if a.nu[x] == a.base {
            continue;
        }
        let (lo, hi) = a.bullets[x].ok_or_else(|| AmalgamError::NoBullets(a.carrier.element(x).clone()))?;
        let across = at(hi, lo);
        oplus[x] = at(x, lo) == across;
        ominus[x] = at(hi, x) == across;
        if !oplus[x] && !ominus[x] {
            return Err(AmalgamError::NotDoubled(a.carrier.element(x).clone()));
        }
    }
    let smaller = |z: usize, t: usize| ix.lt(a.nu[t], a.nu[z]);
    let mut mu = vec![d.zero(); n * n];
    for x in 0..n {
        for y in 0..n {
            let mut acc = at(x, y);
            for t in 0..n {
                if smaller(y, t) || smaller(x, t) {
                    let (xt, ty) = (at(x, t), at(t, y));
                    if restricted && (xt == Capped::Top || ty == Capped::Top) {
                        continue;
                    }
                    acc = acc.meet(xt.join(ty, &d), &d);
                }
            }
            for u in (0..n).filter(|&u| ominus[u] && smaller(x, u)) {
                let xu = at(x, u);
                if restricted && xu == Capped::Top {
                    continue;
                }
                for v in (0..n).filter(|&v| oplus[v] && smaller(y, v)) {
                    let uv = at(u, v);
                    if restricted && uv == Capped::Top {
                        continue;
                    }
                    acc = acc.meet(xu.join(uv, &d).join(at(v, y), &d), &d);
                }
            }
            mu[x * n + y] = acc.value().ok_or_else(|| {
                AmalgamError::TopInOutput(a.carrier.element(x).clone(), a.carrier.element(y).clone())
            })?;
        }
    }
    let measured = PMeasuredPoset::new(a.carrier.clone(), d, mu);
    Ok(AmalgamMeasure { level, bvo, oplus, ominus, measured })
}

/// Meet of `bvo` joins over all chains `x = z_0, ..., z_k = y` with
/// `k <= bound`, skipping steps valued at the adjoined top.
pub fn chain_meets(m: &AmalgamMeasure, bound: usize) -> Vec<Capped> {
    let d = m.target();
    let n = m.measured.len();
    let mut best: Vec<Capped> = m.bvo.clone();
    for _ in 1..bound {
        let mut next = best.clone();
        for x in 0..n {
            for y in 0..n {
                let mut acc = next[x * n + y];
                for z in 0..n {
                    let step = m.bvo(z, y);
                    if step == Capped::Top {
                        continue;
                    }
                    acc = acc.meet(best[x * n + z].join(step, d), d);
                }
                next[x * n + y] = acc;
            }
        }
        best = next;
    }
    best
}

/// Meet over all `u, v` of `bvo(x,u) v bvo(u,v) v bvo(v,y)`.
pub fn three_step_meets(m: &AmalgamMeasure) -> Vec<Capped> {
    let d = m.target();
    let n = m.measured.len();
    let mut out = vec![Capped::Top; n * n];
    for x in 0..n {
        for y in 0..n {
            let mut acc = Capped::Top;
            for u in 0..n {
                let xu = m.bvo(x, u);
                if xu == Capped::Top {
                    continue;
                }
                for v in 0..n {
                    acc = acc.meet(xu.join(m.bvo(u, v), d).join(m.bvo(v, y), d), d);
                }
            }
            out[x * n + y] = acc;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SimpleBvdMismatch {
    #[error("three-step meet differs from the measure at ({0}, {1})")]
    ThreeStep(usize, usize),
    #[error("chain meets with bound 3 and with the larger bound differ at ({0}, {1})")]
    Bound(usize, usize),
}

/// The measure equals the three-step meet and the chain meets with bound 3
/// and with `bound` agree.
pub fn check_simplebvd(m: &AmalgamMeasure, bound: usize) -> Result<(), SimpleBvdMismatch> {
    let n = m.measured.len();
    let three = three_step_meets(m);
    let short = chain_meets(m, 3);
    let long = chain_meets(m, bound.max(3));
    for x in 0..n {
        for y in 0..n {
            let k = x * n + y;
            if three[k] != Capped::Value(m.value(x, y)) || short[k] != three[k] {
                return Err(SimpleBvdMismatch::ThreeStep(x, y));
            }
            if long[k] != short[k] {
                return Err(SimpleBvdMismatch::Bound(x, y));
            }
        }
    }
    Ok(())
}

/// For `x` in the upper doubling class with `nu(x)` not below `nu(y)`, the
/// value at `(x, y)` equals the value at `(upper bullet, y)`; dually for the
/// lower class.
pub fn check_propagation(md: &MeasuredDiagram, a: &StrongAmalgam, m: &AmalgamMeasure) -> Result<(), (usize, usize)> {
    let ix = &md.diagram.index;
    let n = a.len();
    for x in 0..n {
        let Some((lo, hi)) = a.bullets[x] else { continue };
        for y in 0..n {
            if ix.le(a.nu[x], a.nu[y]) {
                continue;
            }
            if m.oplus[x] && m.value(x, y) != m.value(hi, y) {
                return Err((x, y));
            }
            if m.ominus[x] && m.value(y, x) != m.value(y, lo) {
                return Err((y, x));
            }
        }
    }
    Ok(())
}
