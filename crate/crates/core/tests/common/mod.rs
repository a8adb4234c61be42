#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use pmeasure_core::diagram::{IndexSemilattice, SemilatticeDiagram};
use pmeasure_core::element::Element;
use pmeasure_core::extension::{sum_scheme, IntervalScheme};
use pmeasure_core::lab::distributive_lattices_up_to_iso;
use pmeasure_core::measure::{IntervalMeasureFamily, PMeasuredPoset};
use pmeasure_core::order::FinitePoset;
use pmeasure_core::semilattice::{FiniteJoinSemilattice, Homomorphism};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(prefix: &str, n: usize) -> Vec<Element> {
    (0..n).map(|i| Element::base(format!("{prefix}{i}"))).collect()
}

/// Random order on `n` points: random edges `i -> j` for `i < j`, closed.
pub fn random_poset(rng: &mut impl Rng, prefix: &str, n: usize, density: f64) -> FinitePoset {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    FinitePoset::from_pairs(names(prefix, n), &pairs).unwrap()
}

/// Closes a weight table under the triangle inequality by taking, for each
/// pair, the meet over all paths of the join of the steps.
pub fn path_closure(p: &FinitePoset, s: &FiniteJoinSemilattice, mut mu: Vec<usize>) -> Vec<usize> {
    let n = p.len();
    for x in 0..n {
        for y in 0..n {
            if p.le(x, y) {
                mu[x * n + y] = s.zero();
            }
        }
    }
    for k in 0..n {
        for x in 0..n {
            for y in 0..n {
                let through = s.join(mu[x * n + k], mu[k * n + y]);
                mu[x * n + y] = s.meet(mu[x * n + y], through);
            }
        }
    }
    mu
}

pub fn random_pmeasure(rng: &mut impl Rng, p: &FinitePoset, s: &Arc<FiniteJoinSemilattice>) -> PMeasuredPoset {
    let n = p.len();
    let mu: Vec<usize> = (0..n * n).map(|_| rng.gen_range(0..s.len())).collect();
    PMeasuredPoset::new(p.clone(), s.clone(), path_closure(p, s, mu))
}

/// Random measure on `p` with `(hi, lo)` equal to `c`, by truncating random
/// measures below `c`; falls back to the constant measure.
pub fn random_pmeasure_with(
    rng: &mut impl Rng,
    p: &FinitePoset,
    s: &Arc<FiniteJoinSemilattice>,
    hi: usize,
    lo: usize,
    c: usize,
) -> PMeasuredPoset {
    let n = p.len();
    for _ in 0..8 {
        let mut m = random_pmeasure(rng, p, s);
        for v in m.mu.iter_mut() {
            *v = s.meet(*v, c);
        }
        if m.value(hi, lo) == c {
            return m;
        }
    }
    let mu = (0..n * n).map(|k| if p.le(k / n, k % n) { s.zero() } else { c }).collect();
    PMeasuredPoset::new(p.clone(), s.clone(), mu)
}

pub fn small_distributive_lattices(max: usize) -> Vec<Arc<FiniteJoinSemilattice>> {
    (1..=max).flat_map(distributive_lattices_up_to_iso).map(Arc::new).collect()
}

/// Random interval extension with measured blocks over a random base.
pub fn random_family(rng: &mut impl Rng, targets: &[Arc<FiniteJoinSemilattice>]) -> IntervalMeasureFamily {
    loop {
        let s = targets[rng.gen_range(0..targets.len())].clone();
        let n = rng.gen_range(2..=5);
        let p = random_poset(rng, "p", n, 0.5);
        let strict: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| p.lt(a, b)).collect();
        if strict.is_empty() {
            continue;
        }
        let base = random_pmeasure(rng, &p, &s);
        let mut scheme = IntervalScheme { base: p.clone(), blocks: BTreeMap::new() };
        let count = rng.gen_range(1..=3.min(strict.len()));
        let mut tag = 0;
        while scheme.blocks.len() < count {
            let key = strict[rng.gen_range(0..strict.len())];
            if scheme.blocks.contains_key(&key) {
                continue;
            }
            let k = rng.gen_range(1..=3);
            let blk = random_poset(rng, &format!("b{tag}_"), k, 0.5);
            tag += 1;
            scheme.blocks.insert(key, blk);
        }
        let (q, witness) = sum_scheme(&scheme).unwrap();
        let mut blocks = BTreeMap::new();
        for (&(a, b), blk) in &scheme.blocks {
            let mut members: Vec<usize> = vec![q.index_of(p.element(a)).unwrap(), q.index_of(p.element(b)).unwrap()];
            members.extend(blk.elements().iter().map(|e| q.index_of(e).unwrap()));
            let closure = q.induced(&members);
            let (hi, lo) = (closure.index_of(p.element(b)).unwrap(), closure.index_of(p.element(a)).unwrap());
            blocks.insert((a, b), random_pmeasure_with(rng, &closure, &s, hi, lo, base.value(b, a)));
        }
        return IntervalMeasureFamily { base, sup: q, witness, blocks };
    }
}

pub fn powerset_of(k: usize) -> FiniteJoinSemilattice {
    let atoms: Vec<String> = (0..k).map(|i| format!("a{i}")).collect();
    let refs: Vec<&str> = atoms.iter().map(String::as_str).collect();
    FiniteJoinSemilattice::powerset(&refs)
}

/// Random join- and unit-preserving map between powersets, given by the
/// images of the atoms; the images always join to the top.
pub fn random_unital_map(rng: &mut impl Rng, src: &FiniteJoinSemilattice, tgt: &FiniteJoinSemilattice) -> Homomorphism {
    let atoms: Vec<usize> = src.irreducibles().to_vec();
    loop {
        let images: Vec<usize> = atoms.iter().map(|_| rng.gen_range(0..tgt.len())).collect();
        if tgt.join_all(images.iter().copied()) != tgt.top() {
            continue;
        }
        let map = (0..src.len())
            .map(|x| tgt.join_all(atoms.iter().zip(&images).filter(|(&a, _)| src.le(a, x)).map(|(_, &i)| i)))
            .collect();
        let phi = Homomorphism { map, preserves_unit: true };
        phi.check(src, tgt).unwrap();
        return phi;
    }
}

/// Diagram of powersets over a chain of indices `d0 < d1 < ...`, with
/// random unital maps between consecutive objects.
pub fn random_chain_diagram(rng: &mut impl Rng, sizes: &[usize]) -> SemilatticeDiagram {
    let idx: Vec<String> = (0..sizes.len()).map(|i| format!("d{i}")).collect();
    let refs: Vec<&str> = idx.iter().map(String::as_str).collect();
    let index = IndexSemilattice::chain(&refs);
    let objects: Vec<FiniteJoinSemilattice> = sizes.iter().map(|&k| powerset_of(k)).collect();
    let steps: Vec<Homomorphism> =
        (1..objects.len()).map(|i| random_unital_map(rng, &objects[i - 1], &objects[i])).collect();
    let mut t = BTreeMap::new();
    for i in 0..objects.len() {
        let mut phi = Homomorphism::identity(objects[i].len());
        for j in i + 1..objects.len() {
            phi = phi.compose(&steps[j - 1]);
            t.insert((i, j), phi.clone());
        }
    }
    SemilatticeDiagram::new(index, objects, t).unwrap()
}

/// `{0,1}` at the bottom, two powersets in the middle, one on top.
pub fn square_diagram() -> SemilatticeDiagram {
    let idx = FinitePoset::from_pairs(
        vec!["e".into(), "a".into(), "b".into(), "ab".into()],
        &[(0, 1), (0, 2), (1, 3), (2, 3)],
    )
    .unwrap();
    let index = IndexSemilattice::new(idx).unwrap();
    let two = FiniteJoinSemilattice::chain(&["0", "1"]);
    let p = FiniteJoinSemilattice::powerset(&["p"]);
    let pq = FiniteJoinSemilattice::powerset(&["p", "q"]);
    let objects = vec![two, p.clone(), p, pq];
    let unit = |d: &FiniteJoinSemilattice| Homomorphism { map: vec![d.zero(), d.top()], preserves_unit: true };
    let mut t = BTreeMap::new();
    t.insert((0, 1), unit(&objects[1]));
    t.insert((0, 2), unit(&objects[2]));
    t.insert((0, 3), unit(&objects[3]));
    t.insert((1, 3), unit(&objects[3]));
    t.insert((2, 3), unit(&objects[3]));
    SemilatticeDiagram::new(index, objects, t).unwrap()
}

/// Square index `e < a, b < ab` with `{0,1}` at `e` and random powersets and
/// unital maps elsewhere; maps out of `{0,1}` are forced, so it commutes.
pub fn random_square_diagram(rng: &mut impl Rng, ka: usize, kb: usize, kab: usize) -> SemilatticeDiagram {
    let idx = FinitePoset::from_pairs(
        vec!["e".into(), "a".into(), "b".into(), "ab".into()],
        &[(0, 1), (0, 2), (1, 3), (2, 3)],
    )
    .unwrap();
    let index = IndexSemilattice::new(idx).unwrap();
    let objects =
        vec![FiniteJoinSemilattice::chain(&["0", "1"]), powerset_of(ka), powerset_of(kb), powerset_of(kab)];
    let unit = |d: &FiniteJoinSemilattice| Homomorphism { map: vec![d.zero(), d.top()], preserves_unit: true };
    let mut t = BTreeMap::new();
    t.insert((0, 1), unit(&objects[1]));
    t.insert((0, 2), unit(&objects[2]));
    t.insert((0, 3), unit(&objects[3]));
    t.insert((1, 3), random_unital_map(rng, &objects[1], &objects[3]));
    t.insert((2, 3), random_unital_map(rng, &objects[2], &objects[3]));
    SemilatticeDiagram::new(index, objects, t).unwrap()
}
