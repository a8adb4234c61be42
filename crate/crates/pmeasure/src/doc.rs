//! JSON documents: one envelope per file, holding a poset, a semilattice, a
//! measured poset, a (possibly measured) diagram or a run report.
//!
//! Elements are written in a nested structural form and referenced elsewhere
//! by their display name. Measure values are names of target elements.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use pmeasure_core::amalgam::MeasuredDiagram;
use pmeasure_core::construct::{CheckEntry, RunReport};
use pmeasure_core::diagram::{DiagramError, IndexError, IndexSemilattice, SemilatticeDiagram};
use pmeasure_core::element::{Element, GadgetPoint};
use pmeasure_core::measure::PMeasuredPoset;
use pmeasure_core::order::{FinitePoset, OrderError};
use pmeasure_core::semilattice::{FiniteJoinSemilattice, Homomorphism, SemilatticeError};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Poset,
    Semilattice,
    MeasuredPoset,
    Diagram,
    RunReport,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Kind::Poset => "poset",
            Kind::Semilattice => "semilattice",
            Kind::MeasuredPoset => "measured-poset",
            Kind::Diagram => "diagram",
            Kind::RunReport => "run-report",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub kind: Kind,
    pub version: String,
    pub payload: Value,
}

#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0:?}, expected {VERSION:?}")]
    Version(String),
    #[error("expected a {expected} document, found {found}")]
    Kind { expected: String, found: Kind },
    #[error("{what} {name:?} does not resolve")]
    Dangling { what: &'static str, name: String },
    #[error("name {0:?} is used twice")]
    Duplicate(String),
    #[error("join table has {0} rows or columns of the wrong length")]
    TableShape(usize),
    #[error("the join table and the listed order disagree")]
    OrderMismatch,
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Semilattice(#[from] SemilatticeError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Structural form of an element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementDoc {
    Base(String),
    Gadget { level: String, lower: Box<ElementDoc>, upper: Box<ElementDoc>, point: PointDoc },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointDoc {
    Lower(Vec<String>),
    Upper(Vec<String>),
    Filler,
}

impl From<&Element> for ElementDoc {
    fn from(e: &Element) -> Self {
        match e {
            Element::Base(s) => ElementDoc::Base(s.clone()),
            Element::Gadget(g) => ElementDoc::Gadget {
                level: g.level.clone(),
                lower: Box::new((&g.lower).into()),
                upper: Box::new((&g.upper).into()),
                point: match &g.point {
                    GadgetPoint::LowerCopy(x) => PointDoc::Lower(x.clone()),
                    GadgetPoint::UpperCopy(y) => PointDoc::Upper(y.clone()),
                    GadgetPoint::Filler => PointDoc::Filler,
                },
            },
        }
    }
}

impl From<&ElementDoc> for Element {
    fn from(d: &ElementDoc) -> Self {
        match d {
            ElementDoc::Base(s) => Element::base(s.clone()),
            ElementDoc::Gadget { level, lower, upper, point } => {
                let point = match point {
                    PointDoc::Lower(x) => GadgetPoint::LowerCopy(x.clone()),
                    PointDoc::Upper(y) => GadgetPoint::UpperCopy(y.clone()),
                    PointDoc::Filler => GadgetPoint::Filler,
                };
                Element::gadget(level.clone(), (&**lower).into(), (&**upper).into(), point)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetDoc {
    pub elements: Vec<ElementDoc>,
    /// Cover pairs `[lower, upper]`; any generating pairs are accepted.
    #[serde(default)]
    pub covers: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemilatticeDoc {
    pub elements: Vec<ElementDoc>,
    #[serde(default)]
    pub covers: Vec<[String; 2]>,
    /// Row `a` lists the joins `a v b` in element order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub join: Option<Vec<Vec<String>>>,
    /// Whether the greatest element is a distinguished unit.
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub unit: bool,
}

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasuredDoc {
    pub poset: PosetDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<SemilatticeDoc>,
    /// Nonzero entries `[x, y, value]`.
    #[serde(default)]
    pub values: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapDoc {
    pub from: String,
    pub to: String,
    pub map: BTreeMap<String, String>,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub unital: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramDoc {
    pub index: PosetDoc,
    pub objects: BTreeMap<String, SemilatticeDoc>,
    /// Transitions along index covers; the rest are composed.
    #[serde(default)]
    pub maps: Vec<MapDoc>,
    /// Measured blocks by index name; targets are the objects.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BTreeMap<String, MeasuredDoc>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryDoc {
    pub scope: String,
    pub name: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub ok: bool,
    pub summary: String,
    pub entries: Vec<EntryDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

pub fn envelope<T: Serialize>(kind: Kind, payload: &T) -> Envelope {
    Envelope { kind, version: VERSION.to_string(), payload: serde_json::to_value(payload).expect("documents serialize") }
}

/// Pretty JSON with a trailing newline; map keys come out sorted.
pub fn to_text(e: &Envelope) -> String {
    let mut s = serde_json::to_string_pretty(e).expect("documents serialize");
    s.push('\n');
    s
}

pub fn read_envelope(text: &str) -> Result<Envelope, DocError> {
    let e: Envelope = serde_json::from_str(text)?;
    if e.version != VERSION {
        return Err(DocError::Version(e.version));
    }
    Ok(e)
}

pub fn payload<T: for<'de> Deserialize<'de>>(e: &Envelope, kind: Kind) -> Result<T, DocError> {
    if e.kind != kind {
        return Err(DocError::Kind { expected: kind.to_string(), found: e.kind });
    }
    Ok(serde_json::from_value(e.payload.clone())?)
}

fn names_of(elements: &[Element]) -> Result<HashMap<String, usize>, DocError> {
    let mut map = HashMap::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        if map.insert(e.to_string(), i).is_some() {
            return Err(DocError::Duplicate(e.to_string()));
        }
    }
    Ok(map)
}

fn resolve(names: &HashMap<String, usize>, what: &'static str, name: &str) -> Result<usize, DocError> {
    names.get(name).copied().ok_or_else(|| DocError::Dangling { what, name: name.to_string() })
}

fn cover_names(p: &FinitePoset) -> Vec<[String; 2]> {
    p.cover_pairs().into_iter().map(|(x, y)| [p.element(x).to_string(), p.element(y).to_string()]).collect()
}

pub fn poset_doc(p: &FinitePoset) -> PosetDoc {
    PosetDoc { elements: p.elements().iter().map(ElementDoc::from).collect(), covers: cover_names(p) }
}

pub fn parse_poset(d: &PosetDoc) -> Result<FinitePoset, DocError> {
    let elements: Vec<Element> = d.elements.iter().map(Element::from).collect();
    let names = names_of(&elements)?;
    let pairs = d
        .covers
        .iter()
        .map(|[x, y]| Ok((resolve(&names, "element", x)?, resolve(&names, "element", y)?)))
        .collect::<Result<Vec<_>, DocError>>()?;
    Ok(FinitePoset::from_pairs(elements, &pairs)?)
}

pub fn semilattice_doc(s: &FiniteJoinSemilattice) -> SemilatticeDoc {
    SemilatticeDoc {
        elements: s.poset().elements().iter().map(ElementDoc::from).collect(),
        covers: cover_names(s.poset()),
        join: None,
        unit: s.unit().is_some(),
    }
}

/// Builds the semilattice from the join table when one is given (checking
/// it against any listed order), otherwise derives joins from the order.
pub fn parse_semilattice(d: &SemilatticeDoc) -> Result<FiniteJoinSemilattice, DocError> {
    let s = match &d.join {
        Some(rows) => {
            let elements: Vec<Element> = d.elements.iter().map(Element::from).collect();
            let names = names_of(&elements)?;
            let n = elements.len();
            if rows.len() != n {
                return Err(DocError::TableShape(rows.len()));
            }
            let mut table = Vec::with_capacity(n * n);
            for row in rows {
                if row.len() != n {
                    return Err(DocError::TableShape(row.len()));
                }
                for v in row {
                    table.push(resolve(&names, "element", v)?);
                }
            }
            let s = FiniteJoinSemilattice::from_join_table(elements, &table)?;
            if !d.covers.is_empty() {
                let listed = parse_poset(&PosetDoc { elements: d.elements.clone(), covers: d.covers.clone() })?;
                if &listed != s.poset() {
                    return Err(DocError::OrderMismatch);
                }
            }
            s
        }
        None => FiniteJoinSemilattice::from_poset(parse_poset(&PosetDoc {
            elements: d.elements.clone(),
            covers: d.covers.clone(),
        })?)?,
    };
    Ok(if d.unit { s } else { s.without_unit() })
}

pub fn measured_doc(m: &PMeasuredPoset, with_target: bool) -> MeasuredDoc {
    let n = m.len();
    let s = &*m.target;
    let mut values = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let v = m.value(x, y);
            if v != s.zero() {
                values.push([m.poset.element(x).to_string(), m.poset.element(y).to_string(), s.name(v)]);
            }
        }
    }
    MeasuredDoc { poset: poset_doc(&m.poset), target: with_target.then(|| semilattice_doc(s)), values }
}

/// Resolves values against `target` when given, otherwise against the
/// document's own target.
pub fn parse_measured(d: &MeasuredDoc, target: Option<Arc<FiniteJoinSemilattice>>) -> Result<PMeasuredPoset, DocError> {
    let poset = parse_poset(&d.poset)?;
    let target = match (target, &d.target) {
        (Some(t), _) => t,
        (None, Some(t)) => Arc::new(parse_semilattice(t)?),
        (None, None) => return Err(DocError::Dangling { what: "target", name: String::from("<missing>") }),
    };
    let names = names_of(poset.elements())?;
    let values: HashMap<String, usize> = (0..target.len()).map(|i| (target.name(i), i)).collect();
    let mut m = PMeasuredPoset::zero(poset, target);
    for [x, y, v] in &d.values {
        let (x, y) = (resolve(&names, "element", x)?, resolve(&names, "element", y)?);
        m.set(x, y, resolve(&values, "value", v)?);
    }
    Ok(m)
}

pub fn diagram_doc(d: &SemilatticeDiagram, blocks: Option<&MeasuredDiagram>) -> DiagramDoc {
    let ix = &d.index;
    let objects = (0..ix.len()).map(|i| (ix.name(i).to_string(), semilattice_doc(&d.objects[i]))).collect();
    let maps = ix
        .poset()
        .cover_pairs()
        .into_iter()
        .map(|(i, j)| {
            let (src, tgt, phi) = (&d.objects[i], &d.objects[j], d.phi(i, j));
            MapDoc {
                from: ix.name(i).to_string(),
                to: ix.name(j).to_string(),
                map: (0..src.len()).map(|a| (src.name(a), tgt.name(phi.apply(a)))).collect(),
                unital: phi.preserves_unit,
            }
        })
        .collect();
    let blocks = blocks.map(|md| md.blocks.iter().map(|(&i, b)| (ix.name(i).to_string(), measured_doc(b, false))).collect());
    DiagramDoc { index: poset_doc(ix.poset()), objects, maps, blocks }
}

/// The diagram and, when the document carries blocks, the measured diagram.
pub fn parse_diagram(d: &DiagramDoc) -> Result<(SemilatticeDiagram, Option<MeasuredDiagram>), DocError> {
    let index = IndexSemilattice::new(parse_poset(&d.index)?)?;
    let n = index.len();
    let mut objects = Vec::with_capacity(n);
    for i in 0..n {
        let name = index.name(i);
        let doc = d.objects.get(name).ok_or_else(|| DocError::Dangling { what: "object", name: name.to_string() })?;
        objects.push(parse_semilattice(doc)?);
    }
    if let Some(extra) = d.objects.keys().find(|k| index.index_of_name(k).is_none()) {
        return Err(DocError::Dangling { what: "index", name: extra.clone() });
    }
    let mut t: BTreeMap<(usize, usize), Homomorphism> = BTreeMap::new();
    for m in &d.maps {
        let idx = |name: &str| index.index_of_name(name).ok_or_else(|| DocError::Dangling { what: "index", name: name.to_string() });
        let (i, j) = (idx(&m.from)?, idx(&m.to)?);
        let (src, tgt) = (&objects[i], &objects[j]);
        let tgt_names: HashMap<String, usize> = (0..tgt.len()).map(|b| (tgt.name(b), b)).collect();
        let mut map = vec![usize::MAX; src.len()];
        for (a, b) in &m.map {
            let a = src.index_of_name(a).ok_or_else(|| DocError::Dangling { what: "element", name: a.clone() })?;
            map[a] = resolve(&tgt_names, "element", b)?;
        }
        if let Some(a) = map.iter().position(|&v| v == usize::MAX) {
            return Err(DocError::Dangling { what: "map entry for", name: src.name(a) });
        }
        if t.insert((i, j), Homomorphism { map, preserves_unit: m.unital }).is_some() {
            return Err(DocError::Duplicate(format!("{} -> {}", m.from, m.to)));
        }
    }
    // fill the remaining comparable pairs by composing shorter ones
    let mut pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| index.lt(i, j)).collect();
    pairs.sort_by_key(|&(i, j)| index.height(j) - index.height(i));
    for (i, j) in pairs {
        if t.contains_key(&(i, j)) {
            continue;
        }
        let via = (0..n).find(|&k| index.lt(i, k) && index.lt(k, j) && t.contains_key(&(i, k)) && t.contains_key(&(k, j)));
        if let Some(k) = via {
            let (a, b) = (&t[&(i, k)], &t[&(k, j)]);
            let composed = Homomorphism { map: a.compose(b).map, preserves_unit: a.preserves_unit && b.preserves_unit };
            t.insert((i, j), composed);
        }
    }
    let diagram = SemilatticeDiagram::new(index, objects, t)?;
    let blocks = match &d.blocks {
        None => None,
        Some(bs) => {
            let mut md = MeasuredDiagram::new(diagram.clone());
            for (name, b) in bs {
                let i = diagram
                    .index
                    .index_of_name(name)
                    .ok_or_else(|| DocError::Dangling { what: "index", name: name.clone() })?;
                let target = Arc::new(diagram.objects[i].clone());
                md.blocks.insert(i, parse_measured(b, Some(target))?);
            }
            Some(md)
        }
    };
    Ok((diagram, blocks))
}

pub fn report_doc(r: &RunReport, summary: impl Into<String>, data: Option<Value>) -> ReportDoc {
    ReportDoc {
        ok: r.all_ok(),
        summary: summary.into(),
        entries: r
            .entries
            .iter()
            .map(|e| EntryDoc { scope: e.scope.clone(), name: e.name.clone(), ok: e.ok, detail: e.detail.clone() })
            .collect(),
        data,
    }
}

pub fn parse_report(d: &ReportDoc) -> RunReport {
    RunReport {
        entries: d
            .entries
            .iter()
            .map(|e| CheckEntry { scope: e.scope.clone(), name: e.name.clone(), ok: e.ok, detail: e.detail.clone() })
            .collect(),
    }
}

/// Reads a file holding a semilattice or a diagram.
#[allow(clippy::large_enum_variant)]
pub enum Input {
    Semilattice(FiniteJoinSemilattice),
    Diagram(SemilatticeDiagram, Option<MeasuredDiagram>),
}

pub fn parse_input(e: &Envelope) -> Result<Input, DocError> {
    match e.kind {
        Kind::Semilattice => Ok(Input::Semilattice(parse_semilattice(&payload(e, Kind::Semilattice)?)?)),
        Kind::Diagram => {
            let (d, md) = parse_diagram(&payload(e, Kind::Diagram)?)?;
            Ok(Input::Diagram(d, md))
        }
        found => Err(DocError::Kind { expected: String::from("semilattice or diagram"), found }),
    }
}
