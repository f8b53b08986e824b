//! Graphviz export of the part-of hierarchy.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sitkernel_core::{Store, Symbol};

use crate::Error;

/// `child -> parent` edges with implied ones dropped. Situations that are part
/// of nothing get an edge to `w`.
pub fn reduced_edges(store: &Store) -> Vec<(Symbol, Symbol)> {
    let direct = store.edges();
    let mut out: Vec<(Symbol, Symbol)> = direct
        .iter()
        .filter(|(c, p)| {
            // implied when some other parent of `c` already lies below `p`
            !direct.iter().any(|(c2, q)| c2 == c && q != p && store.part_of(q, p))
        })
        .cloned()
        .collect();
    let with_parent: BTreeSet<&Symbol> = direct.iter().map(|(c, _)| c).collect();
    let world = store.world();
    for s in store.situations() {
        if s != world && !with_parent.contains(s) {
            out.push((s.clone(), world.clone()));
        }
    }
    out.sort();
    out
}

pub fn to_dot(store: &Store) -> String {
    let mut out = String::from("digraph situations {\n");
    for s in store.situations() {
        let _ = writeln!(out, "  {s:?};");
    }
    for (c, p) in reduced_edges(store) {
        let _ = writeln!(out, "  {c:?} -> {p:?};");
    }
    out.push_str("}\n");
    out
}

pub fn export_graph(store: &Store, path: &Path) -> Result<(), Error> {
    fs::write(path, to_dot(store)).map_err(|source| Error::Io { path: path.to_owned(), source })
}
