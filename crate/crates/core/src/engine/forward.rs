use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{eval_atoms, subst, Binding, Constraint, FactBase, Firing, FiringOutcome, Mode, Trail};
use crate::error::Error;
use crate::kb::Kb;
use crate::ontology::{BasicKind, Entity, Infon, Kind, Symbol, Term};
use crate::store::Anchoring;
use crate::Result;

impl Kb {
    /// Model in which antecedents of forward constraints of `group` are matched.
    fn antecedent_model(&self, group: &Symbol) -> Result<FactBase> {
        let depth = self.config.depth;
        let mut fb = FactBase::from_store(&self.store, &Anchoring::default());
        fb.depth = depth;
        let rules = self.backward_rules(&[group]);
        let check = |i: &Infon| self.validate_infon(i, false).is_ok();
        super::model::saturate(&mut fb, &rules, depth, &check)?;
        Ok(fb)
    }

    fn matches(&self, cache: &mut BTreeMap<Symbol, FactBase>, c: &Constraint, group: &Symbol, start: Binding) -> Result<Vec<Binding>> {
        if !cache.contains_key(group) {
            cache.insert(group.clone(), self.antecedent_model(group)?);
        }
        let found = eval_atoms(&cache[group], &c.antecedents, alloc::vec![(start, Trail::default())])?;
        let set: BTreeSet<Binding> = found.into_iter().map(|(b, _)| b).collect();
        Ok(set.into_iter().collect())
    }

    fn fresh_situation(&mut self) -> Result<Symbol> {
        let mut n = 1usize;
        loop {
            let name = Symbol::from(alloc::format!("_sit{n}"));
            if self.registry.entity(&name).is_none() {
                self.declare_object_inner(name.clone(), Kind::Basic(BasicKind::Sit), BasicKind::Sit)?;
                return Ok(name);
            }
            n += 1;
        }
    }

    /// Binds the existential situation variables of `c`'s consequents: an
    /// existing situation already supporting all of them is reused, otherwise
    /// a fresh situation is created.
    fn bind_existentials(&mut self, c: &Constraint, b: &mut Binding) -> Result<bool> {
        let mut created = false;
        let open: BTreeSet<Symbol> = c
            .consequents
            .iter()
            .filter_map(|a| match &a.situation {
                Term::Var(v) if !b.contains_key(v) => Some(v.clone()),
                _ => None,
            })
            .collect();
        for v in open {
            let wanted: Vec<Infon> =
                c.consequents.iter().filter(|a| a.situation == Term::Var(v.clone())).map(|a| subst(&a.infon, b)).collect();
            let existing = self
                .store
                .situations()
                .filter(|s| matches!(self.registry.entity(s), Some(Entity::Object { .. })))
                .find(|s| wanted.iter().all(|i| self.store.supports_directly(s, i)))
                .cloned();
            let s = match existing {
                Some(s) => s,
                None => {
                    created = true;
                    self.fresh_situation()?
                }
            };
            b.insert(v, Term::Name(s));
        }
        Ok(created)
    }

    /// Fires forward constraints until nothing new is asserted.
    ///
    /// Constraints are visited in (group, name) order, bindings in sorted
    /// order, so runs are reproducible. A consequent already supported is
    /// skipped; a consequent the store refuses is logged once and
    /// skipped. Stops with an error after `config.max_firings` accepted
    /// assertions if more are pending.
    pub fn forward_chain(&mut self) -> Result<Vec<Firing>> {
        let start = self.firing_log.len();
        let result = self.forward_inner();
        let fired = self.firing_log[start..].to_vec();
        result.map(|()| fired)
    }

    fn forward_inner(&mut self) -> Result<()> {
        let keys: Vec<(Symbol, Symbol)> =
            self.constraints.iter().filter(|(_, c)| c.direction.forward()).map(|(k, _)| k.clone()).collect();
        let cap = self.config.max_firings;
        let mut accepted = 0usize;
        let mut refused: BTreeSet<(Symbol, Symbol, Symbol, Infon)> = BTreeSet::new();
        let mut cache = BTreeMap::new();
        loop {
            let mut progress = false;
            for key in &keys {
                let c = self.constraints[key].clone();
                if !self.is_candidate(&c) {
                    continue;
                }
                let group = self.config.antecedent_perspective.clone().unwrap_or_else(|| c.group.clone());
                let negated = c.antecedents.iter().any(|a| a.mode == Mode::NotSupports);
                for b in self.matches(&mut cache, &c, &group, Binding::new())? {
                    if negated && cache.is_empty() && self.matches(&mut cache, &c, &group, b.clone())?.is_empty() {
                        continue;
                    }
                    let mut b = b;
                    if self.bind_existentials(&c, &mut b)? {
                        cache.clear();
                    }
                    let pending: Vec<(Symbol, Infon)> = c
                        .consequents
                        .iter()
                        .filter_map(|a| {
                            let atom = a.substitute(&b);
                            atom.situation.as_name().cloned().map(|s| (s, atom.infon))
                        })
                        .collect();
                    for (i, (s, infon)) in pending.iter().enumerate() {
                        if self.store.supports_directly(s, infon) {
                            continue;
                        }
                        if accepted == cap {
                            return Err(Error::FiringCapExhausted { cap, frontier: pending[i..].to_vec() });
                        }
                        let firing = |outcome| Firing {
                            group: c.group.clone(),
                            constraint: c.name.clone(),
                            bindings: b.clone(),
                            situation: s.clone(),
                            infon: infon.clone(),
                            outcome,
                        };
                        match self.assert_infons(s, core::slice::from_ref(infon), None) {
                            Ok(()) => {
                                accepted += 1;
                                progress = true;
                                cache.clear();
                                self.firing_log.push(firing(FiringOutcome::Accepted));
                            }
                            Err(e) => {
                                if refused.insert((c.group.clone(), c.name.clone(), s.clone(), infon.clone())) {
                                    self.firing_log.push(firing(FiringOutcome::Refused(e)));
                                }
                            }
                        }
                    }
                }
            }
            if !progress {
                return Ok(());
            }
        }
    }
}
