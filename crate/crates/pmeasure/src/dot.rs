//! Graphviz output: Hasse diagrams drawn bottom to top, one rank per height.

use std::collections::BTreeMap;
use std::fmt::Write;

use pmeasure_core::element::Element;
use pmeasure_core::measure::PMeasuredPoset;
use pmeasure_core::order::FinitePoset;
use sha2::{Digest, Sha256};

use crate::doc::ElementDoc;

/// Stable node id: a prefix of the digest of the element's structural form.
pub fn node_id(e: &Element) -> String {
    let canonical = serde_json::to_string(&ElementDoc::from(e)).expect("elements serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut id = String::from("n");
    for b in &digest[..6] {
        write!(id, "{b:02x}").unwrap();
    }
    id
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn emit(p: &FinitePoset, label: impl Fn(usize, usize) -> Option<String>) -> String {
    let ids: Vec<String> = p.elements().iter().map(node_id).collect();
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    for (x, e) in p.elements().iter().enumerate() {
        writeln!(out, "  {} [label={}];", ids[x], quote(&e.to_string())).unwrap();
    }
    let mut ranks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (x, h) in p.heights().into_iter().enumerate() {
        ranks.entry(h).or_default().push(x);
    }
    for row in ranks.values() {
        let members: Vec<&str> = row.iter().map(|&x| ids[x].as_str()).collect();
        writeln!(out, "  {{ rank=same; {}; }}", members.join("; ")).unwrap();
    }
    for (x, y) in p.cover_pairs() {
        match label(x, y) {
            Some(l) => writeln!(out, "  {} -> {} [label={}];", ids[x], ids[y], quote(&l)).unwrap(),
            None => writeln!(out, "  {} -> {};", ids[x], ids[y]).unwrap(),
        }
    }
    out.push_str("}\n");
    out
}

pub fn poset_dot(p: &FinitePoset) -> String {
    emit(p, |_, _| None)
}

/// Each cover `x < y` is labeled with the value at `(y, x)`; zero values get
/// an empty label.
pub fn measured_dot(m: &PMeasuredPoset) -> String {
    let s = &*m.target;
    emit(&m.poset, |x, y| {
        let v = m.value(y, x);
        Some(if v == s.zero() { String::new() } else { s.name(v) })
    })
}
