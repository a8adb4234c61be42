//! The representation construction: Boolean gadgets inserted into the prime
//! intervals of each strong amalgam, level by level along the index, and
//! the single-semilattice driver built on top of it.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::amalgam::{
    amalgam_lattice_ops, amalgam_measure, amalgam_order, check_db1_db2, check_order_independence,
    check_propagation, check_simplebvd, compute_bullets, validate_normal_diagram, AmalgamError, MeasuredDiagram,
    StrongAmalgam,
};
use crate::diagram::SemilatticeDiagram;
use crate::element::{Element, GadgetPoint};
use crate::extension::{analyze_extension, sum_scheme, IntervalScheme};
use crate::measure::{
    check_p1, check_p2, check_p3, extend_measure_to_interval_extension, ExtendError, IntervalMeasureFamily,
    P2Mode, PMeasuredPoset,
};
use crate::order::FinitePoset;
use crate::semilattice::FiniteJoinSemilattice;

pub const DEFAULT_BUDGET: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error("{0} is not covered by {1}")]
    NotCover(Element, Element),
    #[error("level {level} needs {needed} elements, budget is {budget}")]
    BudgetExceeded { level: String, needed: usize, budget: usize },
    #[error("object at {index} is not distributive: {c} <= {a} v {b} does not split")]
    NotDistributive { index: String, a: String, b: String, c: String },
    #[error("transition {0} -> {1} does not preserve the unit")]
    NotUnital(String, String),
    #[error("object at the least index {0} is not the two-element lattice")]
    BadBase(String),
    #[error("amalgam at {0}: {1}")]
    Amalgam(String, AmalgamError),
    #[error("measure extension at {0}: {1}")]
    Extend(String, ExtendError),
}

/// Doubled Boolean lattice on the irreducibles below the value of a prime
/// interval, or a single filler point when that value is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub level: usize,
    pub lower: Element,
    pub upper: Element,
    /// Irreducibles of the level object below the interval value.
    pub one_set: Vec<usize>,
    /// The inserted points.
    pub elements: FinitePoset,
    /// Measure on the inserted points together with both endpoints.
    pub closure: PMeasuredPoset,
}

impl Gadget {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_filler(&self) -> bool {
        self.one_set.is_empty()
    }
}

/// Points of the closure: `Lower(X)` for every `X` (with `Lower(empty)` the
/// lower endpoint and `Lower(full)` the shared middle), `Upper(Y)` for
/// nonempty `Y` (with `Upper(full)` the upper endpoint).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Lower(u64),
    Upper(u64),
}

/// Number of inserted points for an interval value with `k` irreducibles
/// below it.
pub fn gadget_size(k: usize) -> Option<usize> {
    if k == 0 {
        return Some(1);
    }
    if k + 1 >= usize::BITS as usize {
        return None;
    }
    Some((1usize << (k + 1)) - 3)
}

/// Builds the gadget for the prime interval `x < y` of `p`, whose values live
/// in `p.target`.
pub fn build_gadget(p: &PMeasuredPoset, x: usize, y: usize, level: usize, level_name: &str) -> Result<Gadget, ConstructError> {
    let q = &p.poset;
    if !q.covers(x, y) {
        return Err(ConstructError::NotCover(q.element(x).clone(), q.element(y).clone()));
    }
    let d = &*p.target;
    let value = p.value(y, x);
    let one_set: Vec<usize> = d.irreducibles().iter().copied().filter(|&j| d.le(j, value)).collect();
    let (lo, hi) = (q.element(x).clone(), q.element(y).clone());
    let tag = |point: GadgetPoint| Element::gadget(level_name, lo.clone(), hi.clone(), point);
    if one_set.is_empty() {
        let t = tag(GadgetPoint::Filler);
        let elements = FinitePoset::chain_of(vec![t.clone()]);
        let closure_poset = FinitePoset::chain_of(vec![lo.clone(), t, hi.clone()]);
        let closure = PMeasuredPoset::zero(closure_poset, p.target.clone());
        return Ok(Gadget { level, lower: lo, upper: hi, one_set, elements, closure });
    }
    let k = one_set.len();
    if k > 62 {
        return Err(ConstructError::BudgetExceeded {
            level: level_name.to_string(),
            needed: usize::MAX,
            budget: 0,
        });
    }
    let full: u64 = (1u64 << k) - 1;
    let names = |mask: u64| -> Vec<String> {
        let mut v: Vec<String> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| d.name(one_set[b])).collect();
        v.sort();
        v
    };
    let join_of = |mask: u64| d.join_all((0..k).filter(|b| mask >> b & 1 == 1).map(|b| one_set[b]));

    let mut slots: Vec<Slot> = vec![Slot::Lower(0)];
    slots.extend((1..=full).map(Slot::Lower));
    slots.extend((1..full).map(Slot::Upper));
    slots.push(Slot::Upper(full));
    let last = slots.len() - 1;
    let elements_of = |s: &Slot| match *s {
        Slot::Lower(0) => lo.clone(),
        Slot::Upper(m) if m == full => hi.clone(),
        Slot::Lower(m) => tag(GadgetPoint::LowerCopy(names(m))),
        Slot::Upper(m) => tag(GadgetPoint::UpperCopy(names(m))),
    };
    let closure_elements: Vec<Element> = slots.iter().map(elements_of).collect();
    let le = |a: Slot, b: Slot| match (a, b) {
        (Slot::Lower(s), Slot::Lower(t)) | (Slot::Upper(s), Slot::Upper(t)) => s & !t == 0,
        (Slot::Lower(_), Slot::Upper(_)) => true,
        (Slot::Upper(_), Slot::Lower(_)) => false,
    };
    let n = slots.len();
    let mut rel = vec![false; n * n];
    let mut mu = vec![d.zero(); n * n];
    for (i, &a) in slots.iter().enumerate() {
        for (j, &b) in slots.iter().enumerate() {
            rel[i * n + j] = le(a, b);
            mu[i * n + j] = match (a, b) {
                (Slot::Lower(s), Slot::Lower(t)) | (Slot::Upper(s), Slot::Upper(t)) => join_of(s & !t),
                (Slot::Lower(_), Slot::Upper(_)) => d.zero(),
                (Slot::Upper(y), Slot::Lower(x)) => join_of((full & !x) | y),
            };
        }
    }
    let closure_poset = FinitePoset::new(closure_elements, &rel).expect("gadget order is a partial order");
    let inner: Vec<usize> = (1..last).collect();
    let elements = closure_poset.induced(&inner);
    let closure = PMeasuredPoset::new(closure_poset, p.target.clone(), mu);
    Ok(Gadget { level, lower: lo, upper: hi, one_set, elements, closure })
}

/// What one level of the construction produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelOutput {
    pub level: usize,
    /// Strong amalgam of the lower blocks; absent at the least index.
    pub amalgam: Option<StrongAmalgam>,
    /// Measure on the amalgam (the base chain at the least index).
    pub amalgam_measure: PMeasuredPoset,
    pub gadgets: Vec<Gadget>,
    pub block: PMeasuredPoset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructOptions {
    pub budget: usize,
    /// Build gadgets in reverse cover order; the output must not change.
    pub reverse_gadget_order: bool,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions { budget: DEFAULT_BUDGET, reverse_gadget_order: false }
    }
}

/// Builds the block at `level` from the blocks strictly below it and returns
/// the diagram extended by the new block.
pub fn level_step(
    md: &MeasuredDiagram,
    level: usize,
    opts: ConstructOptions,
) -> Result<(LevelOutput, MeasuredDiagram), ConstructError> {
    let ix = &md.diagram.index;
    let name = ix.name(level).to_string();
    let d = Arc::new(md.diagram.objects[level].clone());
    let (amalgam, p) = if level == ix.least() {
        if d.len() != 2 {
            return Err(ConstructError::BadBase(name));
        }
        let mut m = PMeasuredPoset::zero(FinitePoset::chain(&["0", "1"]), d.clone());
        m.set(1, 0, d.top());
        let out = LevelOutput { level, amalgam: None, amalgam_measure: m.clone(), gadgets: Vec::new(), block: m.clone() };
        let mut next = md.clone();
        next.blocks.insert(level, m);
        return Ok((out, next));
    } else {
        let a = amalgam_order(md, Some(level)).map_err(|e| ConstructError::Amalgam(name.clone(), e))?;
        let m = amalgam_measure(md, &a, level).map_err(|e| ConstructError::Amalgam(name.clone(), e))?;
        (Some(a), m.measured)
    };
    let mut covers = p.poset.cover_pairs();
    let mut needed = p.len();
    for &(x, y) in &covers {
        let k = d.irreducibles().iter().filter(|&&j| d.le(j, p.value(y, x))).count();
        needed = gadget_size(k).and_then(|s| needed.checked_add(s)).unwrap_or(usize::MAX);
        if needed > opts.budget {
            return Err(ConstructError::BudgetExceeded { level: name, needed, budget: opts.budget });
        }
    }
    if opts.reverse_gadget_order {
        covers.reverse();
    }
    let mut gadgets = Vec::with_capacity(covers.len());
    let mut scheme = IntervalScheme { base: p.poset.clone(), blocks: BTreeMap::new() };
    let mut closures = BTreeMap::new();
    for &(x, y) in &covers {
        let g = build_gadget(&p, x, y, level, &name)?;
        scheme.blocks.insert((x, y), g.elements.clone());
        closures.insert((x, y), g.closure.clone());
        gadgets.push(g);
    }
    if opts.reverse_gadget_order {
        gadgets.reverse();
    }
    let (q, witness) = sum_scheme(&scheme).map_err(|_| ConstructError::Extend(name.clone(), ExtendError::NotInterval))?;
    let family = IntervalMeasureFamily { base: p.clone(), sup: q, witness, blocks: closures };
    let block = extend_measure_to_interval_extension(&family).map_err(|e| ConstructError::Extend(name, e))?;
    let mut next = md.clone();
    next.blocks.insert(level, block.clone());
    Ok((LevelOutput { level, amalgam, amalgam_measure: p, gadgets, block }, next))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelStats {
    pub level: String,
    pub amalgam_size: usize,
    pub gadgets: usize,
    pub fillers: usize,
    pub block_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionRun {
    pub input: SemilatticeDiagram,
    /// `input`, with a two-element bottom index prepended when needed.
    pub diagram: SemilatticeDiagram,
    pub added_bottom: bool,
    pub levels: BTreeMap<usize, LevelOutput>,
    pub output: MeasuredDiagram,
    pub stats: Vec<LevelStats>,
    pub budget: usize,
}

impl ConstructionRun {
    pub fn block(&self, i: usize) -> &PMeasuredPoset {
        self.output.block(i)
    }

    /// Index of `name` in the processed diagram.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.diagram.index.index_of_name(name)
    }

    /// Maximal indices of the processed diagram.
    pub fn maximal_indices(&self) -> Vec<usize> {
        let ix = &self.diagram.index;
        (0..ix.len()).filter(|&i| (0..ix.len()).all(|j| !ix.lt(i, j))).collect()
    }
}

fn check_input(d: &SemilatticeDiagram) -> Result<(), ConstructError> {
    let ix = &d.index;
    for (i, s) in d.objects.iter().enumerate() {
        if let Some((a, b, c)) = s.distributivity_witness() {
            return Err(ConstructError::NotDistributive {
                index: ix.name(i).to_string(),
                a: s.name(a),
                b: s.name(b),
                c: s.name(c),
            });
        }
    }
    for (&(i, j), phi) in &d.transitions {
        if phi.apply(d.objects[i].top()) != d.objects[j].top() {
            return Err(ConstructError::NotUnital(ix.name(i).to_string(), ix.name(j).to_string()));
        }
    }
    Ok(())
}

fn fresh_name(taken: impl Fn(&str) -> bool, stem: &str) -> String {
    let mut name = String::from(stem);
    while taken(&name) {
        name.push('\'');
    }
    name
}

/// Runs the construction over every index in order of height.
pub fn represent_diagram(d: &SemilatticeDiagram, opts: ConstructOptions) -> Result<ConstructionRun, ConstructError> {
    check_input(d)?;
    let needs_bottom = d.objects[d.index.least()].len() != 2;
    let diagram = if needs_bottom {
        let name = fresh_name(|n| d.index.index_of_name(n).is_some(), "bottom");
        d.with_two_element_bottom(&name)
    } else {
        d.clone()
    };
    let mut md = MeasuredDiagram::new(diagram.clone());
    let mut levels = BTreeMap::new();
    let mut stats = Vec::new();
    for level in diagram.index.by_height() {
        let (out, next) = level_step(&md, level, opts)?;
        stats.push(LevelStats {
            level: diagram.index.name(level).to_string(),
            amalgam_size: out.amalgam_measure.len(),
            gadgets: out.gadgets.len(),
            fillers: out.gadgets.iter().filter(|g| g.is_filler()).count(),
            block_size: out.block.len(),
        });
        levels.insert(level, out);
        md = next;
    }
    Ok(ConstructionRun {
        input: d.clone(),
        diagram,
        added_bottom: needs_bottom,
        levels,
        output: md,
        stats,
        budget: opts.budget,
    })
}

/// For every prime interval of a block at `i < level`, some element of the
/// block at `level` lies strictly inside it.
pub fn check_density(md: &MeasuredDiagram, level: usize) -> Result<(), (usize, Element, Element)> {
    let ix = &md.diagram.index;
    let top = &md.blocks[&level].poset;
    for (&i, b) in &md.blocks {
        if !ix.lt(i, level) {
            continue;
        }
        for (x, y) in b.poset.cover_pairs() {
            let (ex, ey) = (b.poset.element(x), b.poset.element(y));
            let (tx, ty) = (top.index_of(ex).unwrap(), top.index_of(ey).unwrap());
            if top.covers(tx, ty) {
                return Err((i, ex.clone(), ey.clone()));
            }
        }
    }
    Ok(())
}

/// Prime interval values are irreducible or zero; strictly irreducible when
/// `strict`.
pub fn check_prime_values(m: &PMeasuredPoset, strict: bool) -> Result<(), (Element, Element)> {
    let d = &*m.target;
    for (x, y) in m.poset.cover_pairs() {
        let v = m.value(y, x);
        let ok = d.is_irreducible(v) || (!strict && v == d.zero());
        if !ok {
            return Err((m.poset.element(x).clone(), m.poset.element(y).clone()));
        }
    }
    Ok(())
}

/// Every irreducible is the value of some atom over the least element.
pub fn check_irreducibles_realized(m: &PMeasuredPoset) -> Result<(), usize> {
    let d = &*m.target;
    let Some(z) = m.poset.least() else {
        return d.irreducibles().first().map_or(Ok(()), |&p| Err(p));
    };
    for &p in d.irreducibles() {
        if !m.poset.upper_covers(z).iter().any(|&x| m.value(x, z) == p) {
            return Err(p);
        }
    }
    Ok(())
}

/// One named check in a report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckEntry {
    pub scope: String,
    pub name: String,
    pub ok: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunReport {
    pub entries: Vec<CheckEntry>,
}

impl RunReport {
    pub fn all_ok(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.ok)
    }

    pub fn push<E: core::fmt::Debug>(&mut self, scope: &str, name: &str, r: Result<(), E>) {
        let detail = r.as_ref().err().map(|e| format!("{e:?}"));
        self.entries.push(CheckEntry { scope: scope.to_string(), name: name.to_string(), ok: r.is_ok(), detail });
    }

    pub fn get(&self, scope: &str, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.scope == scope && e.name == name)
    }
}

/// Chain bound used when comparing short and long chain meets.
pub const CHAIN_BOUND: usize = 5;

/// Re-checks every level of a finished run from scratch.
pub fn verify_run(run: &ConstructionRun) -> RunReport {
    let mut r = RunReport::default();
    let ix = &run.diagram.index;
    let strict = run.diagram.separates_zero();
    for level in ix.by_height() {
        let scope = ix.name(level);
        let ideal = run.output.restrict_to_ideal(level);
        let normal = validate_normal_diagram(&ideal);
        r.push(scope, "normal", normal.normal);
        r.push(scope, "interval", normal.interval);
        r.push(scope, "extension", normal.extension);
        let db = check_db1_db2(&ideal);
        r.push(scope, "db1", db.db1);
        r.push(scope, "db2", db.db2);
        r.push(scope, "db2-incomparable", db.db2_incomparable);
        let block = run.output.block(level);
        r.push(scope, "measure", block.validate());
        r.push(scope, "density", check_density(&ideal, level));
        r.push(scope, "prime-values", check_prime_values(block, strict));
        r.push(scope, "irreducibles-realized", check_irreducibles_realized(block));
        r.push(scope, "lattice", if block.poset.is_lattice() { Ok(()) } else { Err("not a lattice") });
        let out = &run.levels[&level];
        if let Some(a) = &out.amalgam {
            r.push(scope, "covering", covering(&out.amalgam_measure.poset, &block.poset));
            r.push(scope, "amalgam-order", check_order_independence(&ideal, a));
            r.push(scope, "amalgam-lattice", amalgam_lattice_ops(&ideal, a).map(|_| ()));
            r.push(scope, "bullets", compute_bullets(&ideal, a));
            match amalgam_measure(&ideal, a, level) {
                Ok(m) => {
                    let same = if m.measured == out.amalgam_measure { Ok(()) } else { Err("stored measure differs") };
                    r.push(scope, "amalgam-measure", same);
                    r.push(scope, "amalgam-p-measure", m.measured.validate());
                    r.push(scope, "chain-bound", check_simplebvd(&m, CHAIN_BOUND));
                    r.push(scope, "propagation", check_propagation(&ideal, a, &m));
                }
                Err(e) => r.push(scope, "amalgam-measure", Err(e)),
            }
        }
    }
    for top in run.maximal_indices() {
        let scope = ix.name(top);
        let block = run.output.block(top);
        // a transition sending a nonzero value to 0 puts distinct points at
        // distance 0, so faithfulness is only expected when zero is separated
        if strict {
            r.push(scope, "p1", check_p1(block));
        }
        r.push(scope, "p2", check_p2(block, P2Mode::All));
        r.push(scope, "p3", check_p3(block));
        let d = &run.diagram.objects[top];
        r.push(scope, "distributive", if d.is_distributive() { Ok(()) } else { Err(d.distributivity_witness()) });
    }
    r
}

fn covering(p: &FinitePoset, q: &FinitePoset) -> Result<(), &'static str> {
    match analyze_extension(p, q) {
        Ok(w) if w.is_cov() => Ok(()),
        Ok(_) => Err("not a covering extension"),
        Err(_) => Err("not an induced sub-poset"),
    }
}

/// A p-measured poset representing a single semilattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub semilattice: Arc<FiniteJoinSemilattice>,
    pub measured: PMeasuredPoset,
    pub run: ConstructionRun,
    /// Whether a unit was adjoined and the result cut back down.
    pub adjoined_unit: bool,
}

/// Outcome of the checks on a representation.
pub fn verify_representation(rep: &Representation) -> RunReport {
    let mut r = RunReport::default();
    let m = &rep.measured;
    let scope = "representation";
    r.push(scope, "measure", m.validate());
    r.push(scope, "p1", check_p1(m));
    r.push(scope, "p2", check_p2(m, P2Mode::All));
    r.push(scope, "p3", check_p3(m));
    let ok = |b: bool, msg: &'static str| if b { Ok(()) } else { Err(msg) };
    r.push(scope, "meet-semilattice", ok(m.poset.is_meet_semilattice() && m.poset.least().is_some(), "no meets"));
    r.push(scope, "bounded-joins", ok(m.poset.bounded_subsets_have_joins(), "bounded subset without join"));
    if !rep.adjoined_unit && rep.run.diagram.separates_zero() {
        r.push(scope, "positive", ok(positive_on_strict_pairs(m), "zero value on a strict pair"));
    }
    let s = &rep.semilattice;
    r.push(scope, "distributive", ok(s.is_distributive(), "target not distributive"));
    r
}

fn positive_on_strict_pairs(m: &PMeasuredPoset) -> bool {
    let z = m.target.zero();
    (0..m.len()).all(|x| (0..m.len()).all(|y| !m.poset.lt(x, y) || m.value(y, x) != z))
}

/// `s` with a fresh greatest element appended.
pub fn adjoin_unit(s: &FiniteJoinSemilattice) -> FiniteJoinSemilattice {
    let n = s.len();
    let name = fresh_name(|c| s.index_of_name(c).is_some(), "1");
    let mut elements: Vec<Element> = (0..n).map(|i| s.element(i).clone()).collect();
    elements.push(Element::base(name));
    let m = n + 1;
    let mut table = vec![n; m * m];
    for a in 0..n {
        for b in 0..n {
            table[a * m + b] = s.join(a, b);
        }
    }
    FiniteJoinSemilattice::from_join_table(elements, &table).expect("adjoining a unit keeps a semilattice")
}

/// Represents `s` by a p-measured poset. Bounded `s` goes through the
/// two-chain diagram; otherwise a unit is adjoined and the result is cut
/// down to the elements whose distance to zero stays inside `s`.
pub fn represent_semilattice(s: &FiniteJoinSemilattice, opts: ConstructOptions) -> Result<Representation, ConstructError> {
    if let Some((a, b, c)) = s.distributivity_witness() {
        return Err(ConstructError::NotDistributive {
            index: String::from("input"),
            a: s.name(a),
            b: s.name(b),
            c: s.name(c),
        });
    }
    let bounded = s.unit().is_some() && s.len() > 1;
    let target = if bounded { s.clone() } else { adjoin_unit(s) };
    let diagram = if target.len() == 2 {
        SemilatticeDiagram::single("0", target.clone())
    } else {
        SemilatticeDiagram::two_chain(target.clone())
    };
    let run = represent_diagram(&diagram, opts)?;
    let top = *run.maximal_indices().first().expect("finite index has a maximal element");
    let full = run.block(top).clone();
    let semilattice = Arc::new(s.clone());
    let measured = if bounded {
        PMeasuredPoset { poset: full.poset, target: semilattice.clone(), mu: full.mu }
    } else {
        let zero = full.poset.least().expect("construction output has a least element");
        let keep: Vec<usize> = (0..full.len()).filter(|&x| full.value(x, zero) < s.len()).collect();
        let cut = full.restrict(&keep);
        PMeasuredPoset { poset: cut.poset, target: semilattice.clone(), mu: cut.mu }
    };
    Ok(Representation { semilattice, measured, run, adjoined_unit: !bounded })
}
