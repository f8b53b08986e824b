//! Situations, the part-of hierarchy, coherence and anchoring.
//!
//! A situation supports the infons asserted into it, the infons of every
//! situation that is part of it, and everything in the world situation `w`.
//! `w` is implicitly part of every situation, so nothing may be made part of
//! `w` except `w` itself.
//!
//! Every assertion is atomic: the proposition is applied to a copy of the
//! store, the copy is audited for coherence over each touched situation and
//! all of its ancestors, and only then swapped in.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::engine::Firing;
use crate::error::Error;
use crate::kb::Kb;
use crate::ontology::{builtin, of_type_in, BasicKind, Entity, Infon, Kind, Polarity, Registry, Symbol, Term};
use crate::Result;

/// `|=` or `|/=`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Supports,
    NotSupports,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Supports => "|=",
            Mode::NotSupports => "|/=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Situation {
    pub(crate) own: BTreeSet<Infon>,
    pub(crate) parents: BTreeSet<Symbol>,
    pub(crate) children: BTreeSet<Symbol>,
    pub(crate) time: Option<Symbol>,
    pub(crate) place: Option<Symbol>,
}

impl Situation {
    pub fn own(&self) -> &BTreeSet<Infon> {
        &self.own
    }

    /// Situations this one was directly made part of.
    pub fn parents(&self) -> &BTreeSet<Symbol> {
        &self.parents
    }

    pub fn time(&self) -> Option<&Symbol> {
        self.time.as_ref()
    }

    pub fn place(&self) -> Option<&Symbol> {
        self.place.as_ref()
    }
}

/// `situation |= {infons}` or `situation |/= {infons}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proposition {
    pub situation: Symbol,
    pub mode: Mode,
    pub infons: Vec<Infon>,
}

impl Proposition {
    pub fn supports(situation: &str, infons: Vec<Infon>) -> Proposition {
        Proposition { situation: Symbol::new(situation), mode: Mode::Supports, infons }
    }
}

/// Parameter-to-object map read off an anchoring situation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Anchoring {
    pub situation: Option<Symbol>,
    pub map: BTreeMap<Symbol, Term>,
}

impl Anchoring {
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Follows anchors through parameters anchored to other parameters.
    pub fn term(&self, t: &Term) -> Term {
        let mut cur = t;
        // chains are acyclic by construction; the bound guards hand-built maps
        for _ in 0..=self.map.len() {
            match cur {
                Term::Name(n) if self.map.contains_key(n) => cur = &self.map[n],
                _ => break,
            }
        }
        cur.clone()
    }

    /// Replaces anchored parameters. The parameter role of an `anchor` fact is
    /// left alone so that anchor facts survive anchoring unchanged.
    pub fn infon(&self, i: &Infon) -> Infon {
        if self.map.is_empty() {
            return i.clone();
        }
        let is_anchor = i.relation.as_str() == builtin::ANCHOR;
        i.map_args(|pos, a| if is_anchor && pos == 0 { a.clone() } else { self.term(a) })
    }

    /// Parameters of `i` this anchoring would replace.
    pub fn touched(&self, i: &Infon) -> impl Iterator<Item = &Symbol> + '_ {
        let is_anchor = i.relation.as_str() == builtin::ANCHOR;
        let names: Vec<Symbol> = i
            .args
            .iter()
            .enumerate()
            .filter(|(pos, _)| !(is_anchor && *pos == 0))
            .filter_map(|(_, a)| a.as_name().cloned())
            .collect();
        self.map.keys().filter(move |k| names.contains(k))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Store {
    situations: BTreeMap<Symbol, Situation>,
    world: Symbol,
}

impl Default for Store {
    fn default() -> Self {
        Store::new()
    }
}

impl Store {
    pub fn new() -> Store {
        let world = Symbol::new(builtin::WORLD);
        let mut situations = BTreeMap::new();
        situations.insert(world.clone(), Situation::default());
        Store { situations, world }
    }

    pub fn world(&self) -> &Symbol {
        &self.world
    }

    pub fn contains(&self, s: &str) -> bool {
        self.situations.contains_key(s)
    }

    pub fn situation(&self, s: &str) -> Option<&Situation> {
        self.situations.get(s)
    }

    pub fn situations(&self) -> impl Iterator<Item = &Symbol> {
        self.situations.keys()
    }

    pub(crate) fn create(&mut self, name: Symbol) -> Result<()> {
        if self.situations.contains_key(&name) {
            return Err(Error::DuplicateName(name));
        }
        self.situations.insert(name, Situation::default());
        Ok(())
    }

    pub(crate) fn insert(&mut self, s: &Symbol, infon: Infon) -> bool {
        self.situations.get_mut(s).is_some_and(|sit| sit.own.insert(infon))
    }

    /// Every situation that is part of `s`, `s` included. `w` is not listed
    /// unless `s` is `w`.
    pub fn parts(&self, s: &str) -> BTreeSet<Symbol> {
        self.closure(s, |sit| &sit.children)
    }

    /// Every situation `s` is part of, `s` included. For `w` that is all situations.
    pub fn ancestors(&self, s: &str) -> BTreeSet<Symbol> {
        if s == self.world.as_str() {
            return self.situations.keys().cloned().collect();
        }
        self.closure(s, |sit| &sit.parents)
    }

    fn closure(&self, s: &str, next: impl Fn(&Situation) -> &BTreeSet<Symbol>) -> BTreeSet<Symbol> {
        let mut seen = BTreeSet::new();
        let Some((start, _)) = self.situations.get_key_value(s) else { return seen };
        let mut todo = alloc::vec![start.clone()];
        while let Some(cur) = todo.pop() {
            if seen.insert(cur.clone()) {
                if let Some(sit) = self.situations.get(&cur) {
                    todo.extend(next(sit).iter().cloned());
                }
            }
        }
        seen
    }

    /// Reflexive, transitive part-of; `w` is part of everything.
    pub fn part_of(&self, child: &str, parent: &str) -> bool {
        if !self.contains(child) || !self.contains(parent) {
            return false;
        }
        child == parent || child == self.world.as_str() || self.parts(parent).contains(child)
    }

    /// Own infons of `s`, of all its parts, and of `w`. No chaining.
    pub fn effective_infons(&self, s: &str) -> BTreeSet<Infon> {
        let mut out = BTreeSet::new();
        if !self.contains(s) {
            return out;
        }
        let mut parts = self.parts(s);
        parts.insert(self.world.clone());
        for p in &parts {
            out.extend(self.situations[p].own.iter().cloned());
        }
        out
    }

    /// Effective infons plus the transitive `part-of` facts derivable from
    /// the hierarchy (`a` part of `b` is visible wherever `b`'s facts are).
    pub fn visible_infons(&self, s: &str) -> BTreeSet<Infon> {
        let mut out = self.effective_infons(s);
        for b in self.parts(s) {
            for a in self.parts(&b) {
                if a != b {
                    out.insert(part_of_fact(&a, &b));
                }
            }
        }
        out
    }

    /// Support without backward chaining.
    pub fn supports_directly(&self, s: &str, infon: &Infon) -> bool {
        if !self.contains(s) {
            return false;
        }
        let own_has = |p: &str| self.situations.get(p).is_some_and(|sit| sit.own.contains(infon));
        if own_has(self.world.as_str()) {
            return true;
        }
        let parts = self.parts(s);
        if parts.iter().any(|p| own_has(p)) {
            return true;
        }
        if let Some((a, b)) = as_part_of(infon) {
            return a != b && parts.contains(b) && self.parts(b).contains(a);
        }
        false
    }

    /// Records `child` as part of `parent`. Returns whether a new edge was added.
    pub(crate) fn add_part_of(&mut self, child: &Symbol, parent: &Symbol) -> Result<bool> {
        for s in [child, parent] {
            if !self.contains(s) {
                return Err(Error::UnknownSituation(s.clone()));
            }
        }
        if child == parent || *child == self.world {
            return Ok(false);
        }
        if self.part_of(parent, child) {
            return Err(Error::PartOfCycle { child: child.clone(), parent: parent.clone() });
        }
        let added = self.situations.get_mut(child).expect("checked").parents.insert(parent.clone());
        self.situations.get_mut(parent).expect("checked").children.insert(child.clone());
        Ok(added)
    }

    /// Checks that no touched situation, nor any situation above one, supports
    /// an infon together with its dual.
    pub fn check_coherent<'a>(&self, touched: impl IntoIterator<Item = &'a Symbol>) -> Result<()> {
        let mut todo = BTreeSet::new();
        for t in touched {
            todo.extend(self.ancestors(t));
        }
        for s in &todo {
            self.check_one(s)?;
        }
        Ok(())
    }

    fn check_one(&self, s: &Symbol) -> Result<()> {
        let eff = self.effective_infons(s);
        for i in &eff {
            if i.polarity == Polarity::Pos {
                let d = i.dual();
                if eff.contains(&d) {
                    return Err(Error::Incoherent { situation: s.clone(), infon: i.clone(), dual: d });
                }
            }
        }
        Ok(())
    }

    /// Full coherence audit over every situation.
    pub fn audit(&self) -> Result<()> {
        self.situations.keys().try_for_each(|s| self.check_one(s))
    }

    /// Anchors supplied by `situation` (own and inherited anchor facts).
    pub fn anchoring(&self, situation: &str) -> Anchoring {
        let mut map = BTreeMap::new();
        for i in self.effective_infons(situation) {
            if i.relation.as_str() == builtin::ANCHOR && i.polarity == Polarity::Pos {
                if let (Term::Name(p), target) = (&i.args[0], &i.args[1]) {
                    map.entry(p.clone()).or_insert_with(|| target.clone());
                }
            }
        }
        Anchoring { situation: Some(Symbol::new(situation)), map }
    }

    /// Direct part-of edges as `(child, parent)` pairs, sorted.
    pub fn edges(&self) -> Vec<(Symbol, Symbol)> {
        self.situations
            .iter()
            .flat_map(|(c, sit)| sit.parents.iter().map(move |p| (c.clone(), p.clone())))
            .collect()
    }

    fn set_location(&mut self, s: &Symbol, which: &str, value: &Symbol) -> Result<()> {
        let sit = self.situations.get_mut(s).ok_or_else(|| Error::UnknownSituation(s.clone()))?;
        let slot = if which == builtin::TIME_OF { &mut sit.time } else { &mut sit.place };
        match slot {
            Some(existing) if existing != value => Err(Error::LocationConflict {
                situation: s.clone(),
                relation: Symbol::new(which),
                existing: existing.clone(),
                new: value.clone(),
            }),
            _ => {
                *slot = Some(value.clone());
                Ok(())
            }
        }
    }
}

pub(crate) fn part_of_fact(child: &Symbol, parent: &Symbol) -> Infon {
    Infon {
        relation: Symbol::new(builtin::PART_OF),
        args: alloc::vec![Term::Name(child.clone()), Term::Name(parent.clone())],
        polarity: Polarity::Pos,
    }
}

fn as_part_of(i: &Infon) -> Option<(&Symbol, &Symbol)> {
    if i.relation.as_str() != builtin::PART_OF || i.polarity != Polarity::Pos {
        return None;
    }
    match (&i.args[0], &i.args[1]) {
        (Term::Name(a), Term::Name(b)) => Some((a, b)),
        _ => None,
    }
}

fn concrete_situation(reg: &Registry, store: &Store, t: &Term, infon: &Infon) -> Result<Symbol> {
    match t {
        Term::Name(n) if store.contains(n) => Ok(n.clone()),
        _ => Err(Error::SpecialArgsNotConcrete(infon.clone())),
    }
    .and_then(|n| match reg.entity(&n) {
        Some(Entity::Object { .. }) => Ok(n),
        _ => Err(Error::SpecialArgsNotConcrete(infon.clone())),
    })
}

/// Applies one validated, anchored infon to `store`, interpreting the
/// hierarchy, anchoring, location and typing relations.
fn apply_one(reg: &Registry, store: &mut Store, target: &Symbol, infon: Infon, touched: &mut BTreeSet<Symbol>) -> Result<()> {
    if let Some(v) = infon.vars().next() {
        return Err(Error::UnexpectedVariable(v.clone()));
    }
    touched.insert(target.clone());
    match infon.relation.as_str() {
        r @ (builtin::MAKE_PART_OF | builtin::PART_OF) => {
            if infon.polarity == Polarity::Neg {
                return Err(Error::NegativeHierarchyFact(infon));
            }
            let child = concrete_situation(reg, store, &infon.args[0], &infon)?;
            let parent = concrete_situation(reg, store, &infon.args[1], &infon)?;
            store.add_part_of(&child, &parent)?;
            store.insert(&parent, part_of_fact(&child, &parent));
            touched.insert(parent);
            if r == builtin::PART_OF {
                store.insert(target, infon);
            }
        }
        builtin::ANCHOR if infon.polarity == Polarity::Pos => {
            let param = match &infon.args[0] {
                Term::Name(n) => reg.parameter(n).ok_or_else(|| Error::NotAParameter(infon.args[0].clone()))?,
                other => return Err(Error::NotAParameter(other.clone())),
            };
            let value = infon.args[1].clone();
            let fits = match &value {
                Term::Name(n) => match reg.entity(n) {
                    Some(Entity::Parameter(q)) => param.base_kind == BasicKind::Par || q.base_kind == param.base_kind,
                    Some(e) => e.basic_kind() == param.base_kind,
                    None => false,
                },
                Term::Kind(_) => param.base_kind == BasicKind::Typ,
                _ => false,
            };
            if !fits {
                return Err(Error::AnchorKindMismatch { parameter: param.name.clone(), target: value });
            }
            for r in &param.restrictions {
                let inst = r.rename(&param.name, &value);
                if !store.supports_directly(store.world(), &inst) {
                    return Err(Error::AnchorRestriction { parameter: param.name.clone(), target: value, restriction: inst });
                }
            }
            for a in store.ancestors(target) {
                let anchors = store.anchoring(&a);
                if anchors.term(&value) == Term::Name(param.name.clone()) {
                    return Err(Error::AnchorCycle { situation: a, parameter: param.name.clone(), target: value });
                }
                if let Some(existing) = anchors.map.get(&param.name) {
                    if *existing != value {
                        return Err(Error::AnchorDuplicate {
                            situation: a,
                            parameter: param.name.clone(),
                            existing: existing.clone(),
                            new: value,
                        });
                    }
                }
            }
            store.insert(target, infon);
        }
        r @ (builtin::TIME_OF | builtin::PLACE_OF) if infon.polarity == Polarity::Pos => {
            let s = concrete_situation(reg, store, &infon.args[0], &infon)?;
            let value = match &infon.args[1] {
                Term::Name(n) if matches!(reg.entity(n), Some(Entity::Object { .. })) => n.clone(),
                _ => return Err(Error::SpecialArgsNotConcrete(infon.clone())),
            };
            store.set_location(&s, r, &value)?;
            store.insert(target, infon);
        }
        builtin::OF_TYPE => {
            let holds = match (&infon.args[0], &infon.args[1]) {
                (Term::Name(n), Term::Kind(k)) => of_type_in(reg, store, n, k),
                (Term::Kind(_), Term::Kind(k)) => *k == Kind::Basic(BasicKind::Typ),
                _ => false,
            };
            if holds != (infon.polarity == Polarity::Pos) {
                return Err(Error::OfTypeConflict(infon));
            }
            store.insert(target, infon);
        }
        _ => {
            store.insert(target, infon);
        }
    }
    Ok(())
}

impl Kb {
    /// `sit2: ~SIT`.
    pub fn create_situation(&mut self, name: &str) -> Result<()> {
        self.declare_object(name, Kind::Basic(BasicKind::Sit))
    }

    pub fn effective_infons(&self, s: &str) -> Result<BTreeSet<Infon>> {
        if !self.store.contains(s) {
            return Err(Error::UnknownSituation(Symbol::new(s)));
        }
        Ok(self.store.effective_infons(s))
    }

    /// Anchoring defined by a situation, checked to exist.
    pub fn anchoring(&self, situation: Option<&str>) -> Result<Anchoring> {
        match situation {
            None => Ok(Anchoring::default()),
            Some(s) if self.store.contains(s) => Ok(self.store.anchoring(s)),
            Some(s) => Err(Error::UnknownSituation(Symbol::new(s))),
        }
    }

    /// Replaces every parameter anchored in `anchoring` by its anchor.
    pub fn apply_anchoring(&self, infon: &Infon, anchoring: &str) -> Result<Infon> {
        Ok(self.anchoring(Some(anchoring))?.infon(infon))
    }

    /// Asserts a `|=` proposition. The anchoring situation, when given, is
    /// applied first. The whole proposition is refused if any part fails.
    /// Forward chaining runs afterwards and its firings are returned; a
    /// chaining error does not undo the assertion itself.
    pub fn assert_proposition(&mut self, prop: &Proposition, anchoring: Option<&str>) -> Result<Vec<Firing>> {
        if prop.mode == Mode::NotSupports {
            return Err(Error::NegativeAssertion(prop.situation.clone()));
        }
        if prop.infons.is_empty() {
            return Err(Error::EmptyProposition(prop.situation.clone()));
        }
        self.assert_infons(&prop.situation, &prop.infons, anchoring)?;
        let before = self.firing_log.len();
        self.chain_after_change()?;
        Ok(self.firing_log[before..].to_vec())
    }

    /// `anch |= <<anchor, param, target, 1>>`.
    pub fn register_anchor(&mut self, anchoring_situation: &str, param: &str, target: Term) -> Result<()> {
        let fact = Infon::new(builtin::ANCHOR, alloc::vec![Term::name(param), target], Polarity::Pos);
        let fact = self.validate_infon(&fact, false)?;
        self.assert_proposition(&Proposition::supports(anchoring_situation, alloc::vec![fact]), None).map(|_| ())
    }

    /// Store-level atomic assertion, no chaining.
    pub(crate) fn assert_infons(&mut self, situation: &Symbol, infons: &[Infon], anchoring: Option<&str>) -> Result<()> {
        let anchors = self.anchoring(anchoring)?;
        let target = match anchors.term(&Term::Name(situation.clone())) {
            Term::Name(n) => n,
            _ => situation.clone(),
        };
        if !self.store.contains(&target) {
            return Err(Error::UnknownSituation(target));
        }
        let mut next = self.store.clone();
        let mut touched = BTreeSet::new();
        for i in infons {
            let anchored = anchors.infon(i);
            let checked = self.validate_infon(&anchored, false)?;
            apply_one(&self.registry, &mut next, &target, checked, &mut touched)?;
        }
        next.check_coherent(&touched)?;
        self.store = next;
        Ok(())
    }

    /// Membership test for `support` without chaining, exposed for callers
    /// that only need the store.
    pub fn supports_directly(&self, s: &str, infon: &Infon) -> bool {
        self.store.supports_directly(s, infon)
    }
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn is<T: Send + Sync>() {}
    is::<Store>();
    is::<Kb>();
    is::<Box<Error>>();
}
