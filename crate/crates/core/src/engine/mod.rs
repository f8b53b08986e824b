//! Constraints and inference.
//!
//! A constraint links antecedent atoms to consequent atoms. Forward (`=>`)
//! constraints fire when their antecedents hold and assert their consequents;
//! backward (`<=`) constraints are used to prove goals at query time; `<=>`
//! constraints do both. Constraints belong to a named group (a perspectivity
//! set) and may carry background conditions on `w`.
//!
//! Backward proving evaluates the selected groups bottom-up, stratum by
//! stratum, over a snapshot of the store. A derived fact records the height
//! of its proof tree; facts that would exceed the depth limit are not derived
//! and mark their predicate as truncated, which turns an empty answer into a
//! depth-exhaustion error instead of a plain failure.

mod forward;
mod model;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::kb::Kb;
use crate::ontology::{Entity, Infon, Symbol, Term};
use crate::store::Anchoring;
use crate::Result;

pub(crate) use model::{eval_atoms, FactBase, Trail};
pub use crate::store::Mode;

/// Variable assignment produced by unification.
pub type Binding = BTreeMap<Symbol, Term>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// `<=`; the consequent is written on the left.
    Backward,
    /// `=>`
    Forward,
    /// `<=>`
    Both,
}

impl Direction {
    pub fn forward(self) -> bool {
        matches!(self, Direction::Forward | Direction::Both)
    }

    pub fn backward(self) -> bool {
        matches!(self, Direction::Backward | Direction::Both)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Backward => "<=",
            Direction::Forward => "=>",
            Direction::Both => "<=>",
        })
    }
}

/// Optional label; it has no effect on inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintClass {
    Necessary,
    Nomic,
    Conventional,
}

impl ConstraintClass {
    pub fn from_name(s: &str) -> Option<ConstraintClass> {
        match s {
            "necessary" => Some(ConstraintClass::Necessary),
            "nomic" => Some(ConstraintClass::Nomic),
            "conventional" => Some(ConstraintClass::Conventional),
            _ => None,
        }
    }
}

impl fmt::Display for ConstraintClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintClass::Necessary => "necessary",
            ConstraintClass::Nomic => "nomic",
            ConstraintClass::Conventional => "conventional",
        })
    }
}

/// `situation |= infon` or `situation |/= infon`; both sides may hold variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub situation: Term,
    pub mode: Mode,
    pub infon: Infon,
}

impl Atom {
    pub fn new(situation: Term, mode: Mode, infon: Infon) -> Atom {
        Atom { situation, mode, infon }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Symbol> {
        let s = match &self.situation {
            Term::Var(v) => Some(v),
            _ => None,
        };
        s.into_iter().chain(self.infon.vars())
    }

    pub fn substitute(&self, b: &Binding) -> Atom {
        Atom { situation: subst_term(&self.situation, b), mode: self.mode, infon: subst(&self.infon, b) }
    }

    pub fn is_ground(&self) -> bool {
        !self.situation.is_var() && !self.infon.has_vars()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.situation, self.mode, self.infon)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub group: Symbol,
    pub name: Symbol,
    pub antecedents: Vec<Atom>,
    pub direction: Direction,
    pub consequents: Vec<Atom>,
    /// Background conditions, all about `w`.
    pub conditions: Vec<Infon>,
    pub class: Option<ConstraintClass>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FiringOutcome {
    Accepted,
    Refused(Error),
}

/// One attempted consequent assertion during forward chaining.
#[derive(Debug, Clone, PartialEq)]
pub struct Firing {
    pub group: Symbol,
    pub constraint: Symbol,
    pub bindings: Binding,
    pub situation: Symbol,
    pub infon: Infon,
    pub outcome: FiringOutcome,
}

impl fmt::Display for Firing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fire {}: {} {{", self.group, self.constraint)?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "?{k}={v}")?;
        }
        write!(f, "}} => {} |= {} ", self.situation, self.infon)?;
        match &self.outcome {
            FiringOutcome::Accepted => f.write_str("accepted"),
            FiringOutcome::Refused(e) => write!(f, "refused: {e}"),
        }
    }
}

pub(crate) fn subst_term(t: &Term, b: &Binding) -> Term {
    match t {
        Term::Var(v) => b.get(v).cloned().unwrap_or_else(|| t.clone()),
        _ => t.clone(),
    }
}

pub(crate) fn subst(i: &Infon, b: &Binding) -> Infon {
    if b.is_empty() {
        return i.clone();
    }
    i.map_args(|_, a| subst_term(a, b))
}

fn unify_term(pattern: &Term, ground: &Term, b: &mut Binding) -> bool {
    match pattern {
        Term::Var(v) => match b.get(v) {
            Some(bound) => bound == ground,
            None if matches!(ground, Term::Null | Term::Var(_)) => false,
            None => {
                b.insert(v.clone(), ground.clone());
                true
            }
        },
        _ => pattern == ground,
    }
}

/// Extends `bindings` so that `pattern` equals `ground`. Variables never bind
/// to the null object. The input is not modified on failure.
pub fn unify(pattern: &Infon, ground: &Infon, bindings: &Binding) -> Option<Binding> {
    if pattern.relation != ground.relation || pattern.polarity != ground.polarity || pattern.args.len() != ground.args.len() {
        return None;
    }
    let mut b = bindings.clone();
    for (p, g) in pattern.args.iter().zip(&ground.args) {
        if !unify_term(p, g, &mut b) {
            return None;
        }
    }
    Some(b)
}

/// Binds a situation term of an atom to a concrete situation.
pub(crate) fn unify_situation(pattern: &Term, situation: &Symbol, b: &mut Binding) -> bool {
    unify_term(pattern, &Term::Name(situation.clone()), b)
}

impl Kb {
    /// Registers a constraint after validating its patterns.
    ///
    /// Every variable of a consequent must occur in an antecedent, except a
    /// situation variable of a forward-only constraint: such a variable is
    /// existential and is satisfied by an existing situation or a fresh one.
    pub fn define_constraint(&mut self, c: Constraint) -> Result<()> {
        let key = (c.group.clone(), c.name.clone());
        if self.constraints.contains_key(&key) {
            return Err(Error::DuplicateConstraint { group: c.group, name: c.name });
        }
        if c.antecedents.is_empty() || c.consequents.is_empty() {
            return Err(Error::EmptyConstraintSide(c.name));
        }
        let mut c = c;
        for atom in c.antecedents.iter_mut().chain(c.consequents.iter_mut()) {
            self.check_atom_situation(&atom.situation)?;
            atom.infon = self.validate_infon(&atom.infon, true)?;
        }
        if let Some(a) = c.consequents.iter().find(|a| a.mode == Mode::NotSupports) {
            return Err(Error::NegatedConsequent { constraint: c.name.clone(), atom: alloc::format!("{a}") });
        }
        let bound: BTreeSet<&Symbol> = c.antecedents.iter().flat_map(Atom::vars).collect();
        for a in &c.consequents {
            let existential = c.direction == Direction::Forward && a.situation.is_var();
            let mut vars: Vec<&Symbol> = a.infon.vars().collect();
            if let (Term::Var(v), false) = (&a.situation, existential) {
                vars.push(v);
            }
            if let Some(v) = vars.into_iter().find(|v| !bound.contains(v)) {
                return Err(Error::UnboundConsequentVariable { constraint: c.name.clone(), var: v.clone() });
            }
        }
        let mut conditions = Vec::new();
        for k in &c.conditions {
            conditions.push(self.validate_infon(k, false)?);
        }
        c.conditions = conditions;
        self.constraints.insert(key, c);
        Ok(())
    }

    fn check_atom_situation(&self, t: &Term) -> Result<()> {
        match t {
            Term::Var(_) => Ok(()),
            Term::Name(n) if self.store.contains(n) && matches!(self.registry.entity(n), Some(Entity::Object { .. })) => Ok(()),
            Term::Name(n) if self.registry.entity(n).is_none() => Err(Error::UnknownSituation(n.clone())),
            other => Err(Error::NotASituation(other.clone())),
        }
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.values()
    }

    pub fn constraint(&self, group: &str, name: &str) -> Option<&Constraint> {
        self.constraints.get(&(Symbol::new(group), Symbol::new(name)))
    }

    pub fn group_exists(&self, group: &str) -> bool {
        self.constraints.keys().any(|(g, _)| g.as_str() == group)
    }

    /// A constraint is a candidate unless `w` directly supports the dual of
    /// one of its background conditions.
    pub fn is_candidate(&self, c: &Constraint) -> bool {
        let w = self.store.world();
        c.conditions.iter().all(|k| !self.store.supports_directly(w, &k.dual()))
    }

    pub(crate) fn has_forward_constraints(&self) -> bool {
        self.constraints.values().any(|c| c.direction.forward())
    }

    /// Candidate backward-usable constraints of the given groups.
    pub(crate) fn backward_rules(&self, groups: &[&Symbol]) -> Vec<&Constraint> {
        self.constraints
            .values()
            .filter(|c| c.direction.backward() && groups.contains(&&c.group) && self.is_candidate(c))
            .collect()
    }

    pub(crate) fn require_group(&self, g: Option<&Symbol>) -> Result<()> {
        match g {
            Some(g) if !self.group_exists(g) => Err(Error::UnknownGroup(g.clone())),
            _ => Ok(()),
        }
    }

    /// Builds the proof model for a perspectivity set.
    ///
    /// Without an antecedent set (or with the same set), the model is the
    /// fixpoint of the perspective's backward constraints. With a different
    /// antecedent set, the antecedent fixpoint is computed first and the
    /// perspective's constraints are applied once on top of it; the
    /// antecedent set's own conclusions are not visible to the goal.
    pub(crate) fn proof_model(
        &self,
        anchoring: &Anchoring,
        perspective: Option<&Symbol>,
        antecedent: Option<&Symbol>,
        extra: Option<&Symbol>,
        depth: u32,
    ) -> Result<FactBase> {
        let base = FactBase::from_store(&self.store, anchoring);
        fn with_extra<'s>(g: Option<&'s Symbol>, extra: Option<&'s Symbol>) -> Vec<&'s Symbol> {
            g.into_iter().chain(extra).collect()
        }
        let top = self.backward_rules(&with_extra(perspective, extra));
        let check = |i: &Infon| self.validate_infon(i, false).is_ok();
        match antecedent {
            Some(a) if Some(a) != perspective => {
                let ants = self.backward_rules(&with_extra(Some(a), extra));
                let mut lower = base.clone();
                model::saturate(&mut lower, &ants, depth.saturating_sub(1), &check)?;
                let (new, truncated) = model::round(&lower, &top, depth, &check)?;
                let mut out = base;
                out.depth = depth;
                out.truncated.extend(lower.truncated);
                out.truncated.extend(truncated);
                for (t, i, m) in new {
                    out.add(&t, i, m);
                }
                Ok(out)
            }
            _ => {
                let mut out = base;
                out.depth = depth;
                model::saturate(&mut out, &top, depth, &check)?;
                Ok(out)
            }
        }
    }

    /// Proves `goal` in a perspectivity set and returns every distinct
    /// binding under which it holds, sorted. A `|/=` goal must be ground and
    /// succeeds with the given bindings when its `|=` counterpart has no proof.
    pub fn backward_prove(&self, goal: &Atom, perspective: Option<&str>, antecedent: Option<&str>, depth: u32) -> Result<Vec<Binding>> {
        let p = perspective.map(Symbol::new);
        let a = antecedent.map(Symbol::new);
        self.require_group(p.as_ref())?;
        self.require_group(a.as_ref())?;
        let model = self.proof_model(&Anchoring::default(), p.as_ref(), a.as_ref(), None, depth)?;
        let found = eval_atoms(&model, core::slice::from_ref(goal), alloc::vec![(Binding::new(), Trail::default())])?;
        if found.is_empty() && goal.mode == Mode::Supports && model.is_truncated(&goal.infon) {
            return Err(Error::DepthExhausted { depth });
        }
        let set: BTreeSet<Binding> = found.into_iter().map(|(b, _)| b).collect();
        Ok(set.into_iter().collect())
    }

    /// `supports` with chaining: true when the infon is visible in `s` or
    /// provable there by the perspective's backward constraints.
    pub fn supports(&self, s: &str, infon: &Infon, perspective: Option<&str>) -> Result<bool> {
        if !self.store.contains(s) {
            return Err(Error::UnknownSituation(Symbol::new(s)));
        }
        if self.store.supports_directly(s, infon) {
            return Ok(true);
        }
        let goal = Atom::new(Term::name(s), Mode::Supports, infon.clone());
        Ok(!self.backward_prove(&goal, perspective, None, self.config.depth)?.is_empty())
    }
}
