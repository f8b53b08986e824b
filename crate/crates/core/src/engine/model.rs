//! Bottom-up fact base used for backward proving and antecedent matching.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{subst, unify, unify_situation, Atom, Binding, Constraint, Mode};
use crate::error::Error;
use crate::ontology::{Infon, Polarity, Symbol, Term};
use crate::store::{part_of_fact, Anchoring, Store};
use crate::Result;

pub(crate) type Pred = (Symbol, Polarity);

fn pred(i: &Infon) -> Pred {
    (i.relation.clone(), i.polarity)
}

/// Provenance of a visible fact.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Meta {
    /// Height of the proof tree; 0 for stored facts.
    pub height: u32,
    /// Anchored parameters the fact was rewritten through.
    pub params: BTreeSet<Symbol>,
}

/// Accumulated provenance of a partial answer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct Trail {
    pub height: u32,
    /// Number of `|=` atoms matched only by facts of `w`.
    pub background: usize,
    pub params: BTreeSet<Symbol>,
}

/// Snapshot of what every situation supports, extended with derived facts.
/// Facts of `w` are kept once and seen from everywhere.
#[derive(Debug, Clone)]
pub(crate) struct FactBase {
    world: Symbol,
    local: BTreeMap<Symbol, BTreeMap<Infon, Meta>>,
    ancestors: BTreeMap<Symbol, BTreeSet<Symbol>>,
    pub truncated: BTreeSet<Pred>,
    /// Depth limit the model was built with, for error reporting.
    pub depth: u32,
}

impl FactBase {
    pub fn from_store(store: &Store, anchoring: &Anchoring) -> FactBase {
        let world = store.world().clone();
        let mut local = BTreeMap::new();
        let mut ancestors = BTreeMap::new();
        for s in store.situations() {
            let mut facts = BTreeMap::new();
            let mut put = |i: &Infon| {
                let meta = Meta { height: 0, params: anchoring.touched(i).cloned().collect() };
                facts.entry(anchoring.infon(i)).or_insert(meta);
            };
            if *s == world {
                store.situation(s).into_iter().flat_map(|x| x.own()).for_each(&mut put);
            } else {
                let parts = store.parts(s);
                for p in &parts {
                    store.situation(p).into_iter().flat_map(|x| x.own()).for_each(&mut put);
                    for a in store.parts(p) {
                        if a != *p {
                            put(&part_of_fact(&a, p));
                        }
                    }
                }
            }
            local.insert(s.clone(), facts);
            let up = if *s == world { core::iter::once(world.clone()).collect() } else { store.ancestors(s) };
            ancestors.insert(s.clone(), up);
        }
        FactBase { world, local, ancestors, truncated: BTreeSet::new(), depth: 0 }
    }

    pub fn situations(&self) -> impl Iterator<Item = &Symbol> {
        self.local.keys()
    }

    pub fn contains_situation(&self, s: &str) -> bool {
        self.local.contains_key(s)
    }

    pub fn visible(&self, s: &str, i: &Infon) -> bool {
        self.local.get(s).is_some_and(|m| m.contains_key(i)) || self.local[&self.world].contains_key(i)
    }

    /// Adds a derived fact to `s` and every situation above it.
    pub fn add(&mut self, s: &Symbol, i: Infon, meta: Meta) -> bool {
        if !self.contains_situation(s) || self.visible(s, &i) {
            return false;
        }
        for a in self.ancestors[s].clone() {
            self.local.get_mut(&a).expect("known").entry(i.clone()).or_insert_with(|| meta.clone());
        }
        true
    }

    pub fn is_truncated(&self, i: &Infon) -> bool {
        self.truncated.contains(&pred(i))
    }

    /// Matches `pattern` (already substituted) against facts visible in `s`.
    fn find(&self, s: &Symbol, pattern: &Infon, b: &Binding, out: &mut Vec<(Binding, Meta, bool)>) {
        let scan = |m: &BTreeMap<Infon, Meta>, background: bool, out: &mut Vec<(Binding, Meta, bool)>, skip: Option<&BTreeMap<Infon, Meta>>| {
            if !pattern.has_vars() {
                if let Some(meta) = m.get(pattern) {
                    if skip.is_none_or(|k| !k.contains_key(pattern)) {
                        out.push((b.clone(), meta.clone(), background));
                    }
                }
                return;
            }
            let lo = Infon::lower_bound(&pattern.relation);
            for (fact, meta) in m.range(lo..) {
                if fact.relation != pattern.relation {
                    break;
                }
                if skip.is_some_and(|k| k.contains_key(fact)) {
                    continue;
                }
                if let Some(nb) = unify(pattern, fact, b) {
                    out.push((nb, meta.clone(), background));
                }
            }
        };
        let world = &self.local[&self.world];
        if *s == self.world {
            scan(world, true, out, None);
        } else if let Some(m) = self.local.get(s) {
            scan(m, false, out, None);
            scan(world, true, out, Some(m));
        }
    }
}

fn candidates(fb: &FactBase, t: &Term, b: &Binding) -> Vec<(Symbol, Binding)> {
    match t {
        Term::Name(n) if fb.contains_situation(n) => alloc::vec![(n.clone(), b.clone())],
        Term::Var(v) => match b.get(v) {
            Some(Term::Name(n)) if fb.contains_situation(n) => alloc::vec![(n.clone(), b.clone())],
            Some(_) => Vec::new(),
            None => fb
                .situations()
                .filter_map(|s| {
                    let mut nb = b.clone();
                    unify_situation(t, s, &mut nb).then(|| (s.clone(), nb))
                })
                .collect(),
        },
        _ => Vec::new(),
    }
}

/// Evaluates a conjunction left to right, extending each partial answer.
pub(crate) fn eval_atoms(fb: &FactBase, atoms: &[Atom], start: Vec<(Binding, Trail)>) -> Result<Vec<(Binding, Trail)>> {
    let mut current = start;
    for atom in atoms {
        let mut next = Vec::new();
        for (b, trail) in current {
            match atom.mode {
                Mode::Supports => {
                    for (s, sb) in candidates(fb, &atom.situation, &b) {
                        let pattern = subst(&atom.infon, &sb);
                        let mut found = Vec::new();
                        fb.find(&s, &pattern, &sb, &mut found);
                        for (nb, meta, background) in found {
                            let mut t = trail.clone();
                            t.height = t.height.max(meta.height);
                            t.background += usize::from(background);
                            t.params.extend(meta.params);
                            next.push((nb, t));
                        }
                    }
                }
                Mode::NotSupports => {
                    let ground = atom.substitute(&b);
                    let s = match &ground.situation {
                        Term::Name(n) if !ground.infon.has_vars() => n.clone(),
                        _ => return Err(Error::NonGroundNegation(alloc::format!("{ground}"))),
                    };
                    if fb.visible(&s, &ground.infon) {
                        continue;
                    }
                    if fb.is_truncated(&ground.infon) {
                        return Err(Error::DepthExhausted { depth: fb.depth });
                    }
                    next.push((b, trail));
                }
            }
        }
        current = next;
    }
    Ok(current)
}

/// Derived facts of one application of `rules`, not yet in `fb`.
pub(crate) type Derived = Vec<(Symbol, Infon, Meta)>;

/// Applies every rule once against `fb`.
pub(crate) fn round(fb: &FactBase, rules: &[&Constraint], depth: u32, check: &dyn Fn(&Infon) -> bool) -> Result<(Derived, BTreeSet<Pred>)> {
    let mut out: Derived = Vec::new();
    let mut seen: BTreeSet<(Symbol, Infon)> = BTreeSet::new();
    let mut truncated = BTreeSet::new();
    for rule in rules {
        let answers = eval_atoms(fb, &rule.antecedents, alloc::vec![(Binding::new(), Trail::default())])?;
        for (b, trail) in answers {
            for c in &rule.consequents {
                let atom = c.substitute(&b);
                let Term::Name(target) = &atom.situation else { continue };
                if !fb.contains_situation(target) || atom.infon.has_vars() {
                    continue;
                }
                if fb.visible(target, &atom.infon) || seen.contains(&(target.clone(), atom.infon.clone())) {
                    continue;
                }
                if !check(&atom.infon) {
                    continue;
                }
                let height = trail.height + 1;
                if height > depth {
                    truncated.insert(pred(&atom.infon));
                    continue;
                }
                seen.insert((target.clone(), atom.infon.clone()));
                out.push((target.clone(), atom.infon, Meta { height, params: trail.params.clone() }));
            }
        }
    }
    Ok((out, truncated))
}

/// Orders rules into strata so that every `|/=` atom only looks at
/// predicates completed in an earlier stratum. All consequents of one rule
/// share a stratum.
pub(crate) fn stratify<'a>(rules: &[&'a Constraint]) -> Result<Vec<Vec<&'a Constraint>>> {
    let mut level: BTreeMap<Pred, usize> = BTreeMap::new();
    let preds: BTreeSet<Pred> =
        rules.iter().flat_map(|r| r.antecedents.iter().chain(&r.consequents)).map(|a| pred(&a.infon)).collect();
    let limit = preds.len() + 1;
    let get = |level: &BTreeMap<Pred, usize>, p: &Pred| level.get(p).copied().unwrap_or(0);
    loop {
        let mut changed = false;
        for r in rules {
            let mut need = r.consequents.iter().map(|c| get(&level, &pred(&c.infon))).max().unwrap_or(0);
            for a in &r.antecedents {
                need = need.max(get(&level, &pred(&a.infon)) + usize::from(a.mode == Mode::NotSupports));
            }
            if need > limit {
                return Err(Error::Unstratified(r.name.clone()));
            }
            for c in &r.consequents {
                let p = pred(&c.infon);
                if get(&level, &p) < need {
                    level.insert(p, need);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut strata: Vec<Vec<&Constraint>> = Vec::new();
    for r in rules {
        let l = r.consequents.iter().map(|c| get(&level, &pred(&c.infon))).max().unwrap_or(0);
        if strata.len() <= l {
            strata.resize_with(l + 1, Vec::new);
        }
        strata[l].push(r);
    }
    Ok(strata)
}

/// Least fixpoint of `rules` over `fb`, stratum by stratum.
pub(crate) fn saturate(fb: &mut FactBase, rules: &[&Constraint], depth: u32, check: &dyn Fn(&Infon) -> bool) -> Result<()> {
    fb.depth = fb.depth.max(depth);
    if rules.is_empty() {
        return Ok(());
    }
    for stratum in stratify(rules)? {
        loop {
            let (new, truncated) = round(fb, &stratum, depth, check)?;
            fb.truncated.extend(truncated);
            let mut grew = false;
            for (s, i, m) in new {
                grew |= fb.add(&s, i, m);
            }
            if !grew {
                break;
            }
        }
    }
    Ok(())
}
