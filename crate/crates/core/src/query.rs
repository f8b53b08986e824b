//! Query evaluation and solution rendering.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::engine::{eval_atoms, Atom, Binding, Mode, Trail};
use crate::error::Error;
use crate::kb::Kb;
use crate::ontology::{builtin, Infon, Polarity, Symbol, Term};
use crate::Result;

/// A conjunction of atoms; variables shared between atoms must agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub atoms: Vec<Atom>,
}

impl Query {
    pub fn new(atoms: Vec<Atom>) -> Query {
        Query { atoms }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryOptions {
    /// Group whose backward constraints prove the query. `None` restricts
    /// the query to what the store supports directly.
    pub perspective: Option<Symbol>,
    /// Group proving the antecedents of the perspective's constraints.
    pub antecedent: Option<Symbol>,
    /// Extra group made available at both levels.
    pub search: Option<Symbol>,
    pub anchoring: Option<Symbol>,
    /// `None` is unbounded.
    pub max_solutions: Option<usize>,
    pub show_anchors: bool,
    pub show_trace: bool,
    /// Overrides the knowledge base's depth limit.
    pub depth: Option<u32>,
}

impl Default for QueryOptions {
    fn default() -> Self {
        QueryOptions {
            perspective: None,
            antecedent: None,
            search: None,
            anchoring: None,
            max_solutions: None,
            show_anchors: true,
            show_trace: false,
            depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub bindings: Binding,
    /// The query atoms instantiated by `bindings`, anchors applied. Ground.
    pub atoms: Vec<Atom>,
    /// Anchor facts of the anchoring situation used by this solution.
    pub anchors: Vec<Infon>,
    pub anchoring_situation: Option<Symbol>,
}

fn anchor_fact(param: &Symbol, value: &Term) -> Infon {
    Infon { relation: Symbol::new(builtin::ANCHOR), args: alloc::vec![Term::Name(param.clone()), value.clone()], polarity: Polarity::Pos }
}

impl Kb {
    fn check_query_atom(&self, a: &Atom) -> Result<Atom> {
        if let Term::Name(n) = &a.situation {
            if !self.store.contains(n) {
                return Err(Error::UnknownSituation(n.clone()));
            }
        }
        if matches!(a.situation, Term::Kind(_) | Term::Null) {
            return Err(Error::NotASituation(a.situation.clone()));
        }
        Ok(Atom { situation: a.situation.clone(), mode: a.mode, infon: self.validate_infon(&a.infon, true)? })
    }

    /// All solutions of `query`, deduplicated and in a stable order: answers
    /// resting least on background facts of `w` first, then by the first
    /// atom's situation, then by binding values in variable-name order.
    pub fn evaluate(&self, query: &Query, opts: &QueryOptions) -> Result<Vec<Solution>> {
        if query.atoms.is_empty() {
            return Ok(Vec::new());
        }
        for g in [&opts.perspective, &opts.antecedent, &opts.search] {
            self.require_group(g.as_ref())?;
        }
        let anchoring = self.anchoring(opts.anchoring.as_deref())?;
        let depth = opts.depth.unwrap_or(self.config.depth);

        let mut query_params = BTreeSet::new();
        let mut atoms = Vec::new();
        for a in &query.atoms {
            let a = self.check_query_atom(a)?;
            query_params.extend(anchoring.touched(&a.infon).cloned());
            if let Some(n) = a.situation.as_name() {
                if anchoring.map.contains_key(n) {
                    query_params.insert(n.clone());
                }
            }
            atoms.push(Atom { situation: anchoring.term(&a.situation), mode: a.mode, infon: anchoring.infon(&a.infon) });
        }

        let model = self.proof_model(&anchoring, opts.perspective.as_ref(), opts.antecedent.as_ref(), opts.search.as_ref(), depth)?;
        let answers = eval_atoms(&model, &atoms, alloc::vec![(Binding::new(), Trail::default())])?;
        if answers.is_empty() && atoms.iter().any(|a| a.mode == Mode::Supports && model.is_truncated(&a.infon)) {
            return Err(Error::DepthExhausted { depth });
        }

        let mut best: BTreeMap<Binding, Trail> = BTreeMap::new();
        for (b, t) in answers {
            match best.get(&b) {
                Some(old) if old.background <= t.background => {}
                _ => {
                    best.insert(b, t);
                }
            }
        }
        let mut ranked: Vec<(usize, Term, Vec<Term>, Binding, Trail)> = best
            .into_iter()
            .map(|(b, t)| {
                let first = crate::engine::subst_term(&atoms[0].situation, &b);
                (t.background, first, b.values().cloned().collect(), b, t)
            })
            .collect();
        ranked.sort_by(|x, y| (x.0, &x.1, &x.2).cmp(&(y.0, &y.1, &y.2)));
        if let Some(k) = opts.max_solutions {
            ranked.truncate(k);
        }

        Ok(ranked
            .into_iter()
            .map(|(_, _, _, b, t)| {
                let used: BTreeSet<&Symbol> = query_params.iter().chain(t.params.iter()).collect();
                Solution {
                    atoms: atoms.iter().map(|a| a.substitute(&b)).map(|a| Atom { infon: anchoring.infon(&a.infon), ..a }).collect(),
                    anchors: used.into_iter().filter_map(|p| anchoring.map.get(p).map(|v| anchor_fact(p, v))).collect(),
                    bindings: b,
                    anchoring_situation: anchoring.situation.clone(),
                }
            })
            .collect())
    }
}

fn write_infonset(out: &mut String, infons: &[&Infon]) {
    if infons.len() == 1 {
        let _ = write!(out, "{}", infons[0]);
        return;
    }
    out.push('{');
    for (i, inf) in infons.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{inf}");
    }
    out.push('}');
}

/// Renders one solution as a numbered block. Consecutive atoms about the
/// same situation with the same mode are grouped into one infon set.
pub fn render_solution(index: usize, sol: &Solution, opts: &QueryOptions) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Solution {index}:");
    let mut groups: Vec<(&Term, Mode, Vec<&Infon>)> = Vec::new();
    for a in &sol.atoms {
        match groups.last_mut() {
            Some((s, m, v)) if **s == a.situation && *m == a.mode => v.push(&a.infon),
            _ => groups.push((&a.situation, a.mode, alloc::vec![&a.infon])),
        }
    }
    for (i, (s, m, infons)) in groups.iter().enumerate() {
        let _ = write!(out, "{s} {m} ");
        write_infonset(&mut out, infons);
        out.push_str(if i + 1 < groups.len() { ",\n" } else { "\n" });
    }
    if let (true, false, Some(anch)) = (opts.show_anchors, sol.anchors.is_empty(), &sol.anchoring_situation) {
        out.push_str("with the anchoring:\n");
        let _ = write!(out, "{anch} |= ");
        write_infonset(&mut out, &sol.anchors.iter().collect::<Vec<_>>());
        out.push('\n');
    }
    if opts.show_trace {
        out.push_str("anchoring trace:\n");
        for a in &sol.anchors {
            let anch = sol.anchoring_situation.as_ref().map(Symbol::as_str).unwrap_or("-");
            let _ = writeln!(out, "{} -> {} ({anch})", a.args[0], a.args[1]);
        }
    }
    out
}
