//! A cube-indexed diagram of Boolean semilattices whose measured blocks on
//! the cube minus its top admit no common extension: three values forced by
//! the side faces break the triangle inequality.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::amalgam::{amalgam_order, check_db1_db2, validate_normal_diagram, DbReport, MeasuredDiagram, NormalReport};
use crate::diagram::{DiagramError, IndexSemilattice, SemilatticeDiagram};
use crate::element::Element;
use crate::lab::measures::{enumerate_pmeasures, Constraints};
use crate::measure::PMeasuredPoset;
use crate::order::FinitePoset;
use crate::semilattice::{set_name, FiniteJoinSemilattice, Homomorphism};

const fn mask(items: &[u32]) -> u64 {
    let mut m = 0;
    let mut i = 0;
    while i < items.len() {
        m |= 1 << items[i];
        i += 1;
    }
    m
}

/// Generators of the face semilattices, rows by the missing coordinate.
pub const C: [[u64; 4]; 3] = [
    [mask(&[0, 4]), mask(&[3]), mask(&[2]), mask(&[1, 4])],
    [mask(&[0, 4]), mask(&[1, 4]), mask(&[2]), mask(&[3, 4])],
    [mask(&[0, 4]), mask(&[1]), mask(&[3]), mask(&[2, 4])],
];
pub const A: [u64; 3] = [mask(&[0, 1, 4]), mask(&[0, 3, 4]), mask(&[0, 2, 4])];
pub const B: [u64; 3] = [mask(&[2, 3, 4]), mask(&[1, 2, 4]), mask(&[1, 3, 4])];
pub const FULL: u64 = 0b11111;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CubeError {
    #[error("diagram: {0}")]
    Diagram(#[from] DiagramError),
    #[error("fixture constraint fails: {0}")]
    Constraint(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeFixture {
    /// Objects over the full cube of subsets of `{0,1,2}`.
    pub diagram: SemilatticeDiagram,
    /// Position of `{0,1,2}` in the index.
    pub top: usize,
    /// Measured blocks at every index but the top.
    pub blocks: MeasuredDiagram,
    pub c: [[u64; 4]; 3],
    pub a: [u64; 3],
    pub b: [u64; 3],
}

impl CubeFixture {
    /// Index position of the subset `coords` of `{0,1,2}`.
    pub fn index(&self, coords: u64) -> usize {
        self.diagram.index.index_of_name(&set_name(coords)).expect("cube index")
    }

    pub fn object(&self, coords: u64) -> &FiniteJoinSemilattice {
        &self.diagram.objects[self.index(coords)]
    }
}

/// Union closure of `gens` together with the empty set.
pub fn union_closure(gens: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    for &g in gens {
        let grown: Vec<u64> = out.iter().map(|&s| s | g).collect();
        out.extend(grown);
        out.sort_unstable();
        out.dedup();
    }
    out
}

fn point(i: usize) -> Element {
    Element::base(alloc::format!("x{i}"))
}

fn measured(
    elements: Vec<Element>,
    pairs: &[(usize, usize)],
    target: &FiniteJoinSemilattice,
    values: &[(usize, usize, u64)],
) -> PMeasuredPoset {
    let poset = FinitePoset::from_pairs(elements, pairs).expect("cube block order");
    let t = Arc::new(target.clone());
    let mut m = PMeasuredPoset::zero(poset, t.clone());
    for &(x, y, v) in values {
        m.set(x, y, t.index_of_name(&set_name(v)).expect("value lies in the block target"));
    }
    m
}

pub fn build_cube() -> Result<CubeFixture, CubeError> {
    let subsets: Vec<u64> = vec![0b000, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111];
    let names: Vec<Element> = subsets.iter().map(|&s| Element::base(set_name(s))).collect();
    let mut pairs = Vec::new();
    for (i, &p) in subsets.iter().enumerate() {
        for (j, &q) in subsets.iter().enumerate() {
            if p & !q == 0 {
                pairs.push((i, j));
            }
        }
    }
    let index = IndexSemilattice::new(FinitePoset::from_pairs(names, &pairs).expect("cube order"))
        .map_err(|e| CubeError::Constraint(e.to_string()))?;
    let gens = |p: u64| -> Vec<u64> {
        match p.count_ones() {
            0 => vec![FULL],
            1 => {
                let i = p.trailing_zeros() as usize;
                vec![A[i], B[i]]
            }
            2 => {
                let k = (!p & 0b111).trailing_zeros() as usize;
                C[k].to_vec()
            }
            _ => (0..5).map(|e| 1u64 << e).collect(),
        }
    };
    let objects: Vec<FiniteJoinSemilattice> = subsets
        .iter()
        .map(|&p| FiniteJoinSemilattice::from_sets(&union_closure(&gens(p))).expect("union-closed family"))
        .collect();
    let mut transitions = BTreeMap::new();
    for i in 0..subsets.len() {
        for j in 0..subsets.len() {
            if index.le(i, j) {
                let phi = Homomorphism::inclusion(&objects[i], &objects[j])
                    .ok_or_else(|| CubeError::Constraint(alloc::format!("{} is not inside {}", set_name(subsets[i]), set_name(subsets[j]))))?;
                transitions.insert((i, j), phi);
            }
        }
    }
    let diagram = SemilatticeDiagram::new(index, objects, transitions)?;
    for (i, s) in diagram.objects.iter().enumerate() {
        if s.top() != s.index_of_name(&set_name(FULL)).unwrap_or(usize::MAX) {
            return Err(CubeError::Constraint(alloc::format!("largest element at {} is not the full set", diagram.index.name(i))));
        }
        if !s.is_distributive() {
            return Err(CubeError::Constraint(alloc::format!("object at {} is not distributive", diagram.index.name(i))));
        }
    }
    for row in &C {
        if row.iter().fold(0, |acc, &c| acc | c) != FULL {
            return Err(CubeError::Constraint("a generator row does not cover the full set".to_string()));
        }
    }
    let pos = |p: u64| subsets.iter().position(|&s| s == p).unwrap();
    let top = pos(0b111);
    let mut md = MeasuredDiagram::new(diagram.clone());
    let zero = Element::base("0");
    let one = Element::base("1");
    md.blocks.insert(
        pos(0),
        measured(vec![zero.clone(), one.clone()], &[(0, 1)], &diagram.objects[pos(0)], &[(1, 0, FULL)]),
    );
    for i in 0..3 {
        let p = 1u64 << i;
        md.blocks.insert(
            pos(p),
            measured(
                vec![zero.clone(), point(i), one.clone()],
                &[(0, 1), (1, 2)],
                &diagram.objects[pos(p)],
                &[(1, 0, A[i]), (2, 1, B[i]), (2, 0, FULL)],
            ),
        );
    }
    for k in 0..3 {
        let (i, j) = match k {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let p = 0b111 & !(1u64 << k);
        md.blocks.insert(
            pos(p),
            measured(
                vec![zero.clone(), point(i), point(j), one.clone()],
                &[(0, 1), (0, 2), (1, 3), (2, 3)],
                &diagram.objects[pos(p)],
                &[
                    (1, 0, A[i]),
                    (3, 1, B[i]),
                    (2, 0, A[j]),
                    (3, 2, B[j]),
                    (3, 0, FULL),
                    (1, 2, C[k][1]),
                    (2, 1, C[k][2]),
                ],
            ),
        );
    }
    for (&i, b) in &md.blocks {
        b.validate().map_err(|e| CubeError::Constraint(alloc::format!("block {}: {e}", diagram.index.name(i))))?;
    }
    let fixture = CubeFixture { diagram, top, blocks: md, c: C, a: A, b: B };
    let report = validate_normal_diagram(&fixture.blocks);
    if let Some(e) = report.first_error() {
        return Err(CubeError::Constraint(e.to_string()));
    }
    Ok(fixture)
}

/// Everything checked about the fixture, plus the contradiction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeObstruction {
    /// Values forced at `(x0, x2)`, `(x0, x1)` and `(x1, x2)`.
    pub x0_x2: u64,
    pub x0_x1: u64,
    pub x1_x2: u64,
    /// Points of the first value outside the union of the other two.
    pub missing: u64,
    /// Number of p-measures on each block extending the blocks below it,
    /// by index name.
    pub block_counts: Vec<(String, usize)>,
    /// Number of p-measures on the amalgam of all blocks, valued in the top
    /// object, that extend every block.
    pub extensions: usize,
    pub normal: NormalReport,
    pub doubling: DbReport,
    pub amalgam: FinitePoset,
}

const ORACLE_BUDGET: usize = 1_000_000;

pub fn cube_obstruction(f: &CubeFixture) -> CubeObstruction {
    let ix = &f.diagram.index;
    let mut block_counts = Vec::new();
    for (&i, b) in &f.blocks.blocks {
        // the values each block is described by: the unit distance at the
        // bottom, the two chain steps on an edge, the two cross values on a face
        let mut c = Constraints::default();
        let xs: Vec<usize> = (0..3).filter_map(|k| b.poset.index_of(&point(k))).collect();
        let (lo, hi) = (b.poset.least().unwrap(), b.poset.greatest().unwrap());
        match xs[..] {
            [] => {
                c.fix(hi, lo, b.value(hi, lo));
            }
            [x] => {
                c.fix(x, lo, b.value(x, lo)).fix(hi, x, b.value(hi, x));
            }
            [u, v] => {
                c.fix(u, v, b.value(u, v)).fix(v, u, b.value(v, u));
            }
            _ => unreachable!("cube blocks carry at most two points"),
        }
        let mut ok = Some(c);
        for (&j, sub) in &f.blocks.blocks {
            if j != i && ix.le(j, i) {
                ok = ok.and_then(|c| c.extending(&b.poset, sub, f.diagram.phi(j, i)).expect("blocks are induced"));
            }
        }
        let count = match ok {
            Some(c) => enumerate_pmeasures(&b.poset, b.target.clone(), &c, ORACLE_BUDGET, |_| true).unwrap_or(usize::MAX),
            None => 0,
        };
        block_counts.push((ix.name(i).to_string(), count));
    }
    let a = amalgam_order(&f.blocks, Some(f.top)).expect("blocks below the top amalgamate");
    let target = Arc::new(f.diagram.objects[f.top].clone());
    let mut c = Some(Constraints::default());
    for (&j, sub) in &f.blocks.blocks {
        c = c.and_then(|c| c.extending(&a.carrier, sub, f.diagram.phi(j, f.top)).expect("blocks sit in the amalgam"));
    }
    let extensions = match c {
        Some(c) => enumerate_pmeasures(&a.carrier, target, &c, ORACLE_BUDGET, |_| true).unwrap_or(usize::MAX),
        None => 0,
    };
    let forced = |i: usize, j: usize| {
        let face = f.index((1 << i) | (1 << j));
        let b = &f.blocks.blocks[&face];
        let (x, y) = (b.poset.index_of(&point(i)).unwrap(), b.poset.index_of(&point(j)).unwrap());
        let v = f.diagram.phi(face, f.top).apply(b.value(x, y));
        set_mask(&f.diagram.objects[f.top], v)
    };
    let (x0_x2, x0_x1, x1_x2) = (forced(0, 2), forced(0, 1), forced(1, 2));
    CubeObstruction {
        x0_x2,
        x0_x1,
        x1_x2,
        missing: x0_x2 & !(x0_x1 | x1_x2),
        block_counts,
        extensions,
        normal: validate_normal_diagram(&f.blocks),
        doubling: check_db1_db2(&f.blocks),
        amalgam: a.carrier,
    }
}

/// The subset of `{0..4}` an element of a cube object stands for.
pub fn set_mask(s: &FiniteJoinSemilattice, v: usize) -> u64 {
    (0..=FULL).find(|&m| set_name(m) == s.name(v)).expect("cube objects are families of subsets")
}
