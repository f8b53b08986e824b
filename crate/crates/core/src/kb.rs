use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::engine::{Constraint, Firing};
use crate::ontology::{Infon, Registry, Symbol};
use crate::store::Store;
use crate::Result;

/// Inference limits and chaining switches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    /// Maximum proof height for backward chaining.
    pub depth: u32,
    /// Maximum accepted assertions per forward-chaining run.
    pub max_firings: usize,
    /// Run forward chaining after every successful assertion or declaration.
    pub auto_chain: bool,
    /// Group whose backward constraints prove forward antecedents, instead
    /// of each constraint's own group.
    pub antecedent_perspective: Option<Symbol>,
}

impl Default for Config {
    fn default() -> Self {
        Config { depth: 32, max_firings: 10_000, auto_chain: true, antecedent_perspective: None }
    }
}

/// A knowledge base: declarations, situations and constraints.
#[derive(Debug, Clone)]
pub struct Kb {
    pub(crate) registry: Registry,
    pub(crate) store: Store,
    pub(crate) constraints: BTreeMap<(Symbol, Symbol), Constraint>,
    pub(crate) bookkeeping: BTreeSet<Infon>,
    pub(crate) firing_log: Vec<Firing>,
    pub config: Config,
}

impl Default for Kb {
    fn default() -> Self {
        Kb::new()
    }
}

impl Kb {
    pub fn new() -> Kb {
        Kb::with_config(Config::default())
    }

    pub fn with_config(config: Config) -> Kb {
        let mut kb = Kb {
            registry: Registry::default(),
            store: Store::new(),
            constraints: BTreeMap::new(),
            bookkeeping: BTreeSet::new(),
            firing_log: Vec::new(),
            config,
        };
        kb.install_builtins();
        kb
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// Facts inserted automatically by declarations (`of-type` in w).
    pub fn is_bookkeeping(&self, infon: &Infon) -> bool {
        self.bookkeeping.contains(infon)
    }

    /// Drains the record of rule firings accumulated since the last call.
    pub fn take_firings(&mut self) -> Vec<Firing> {
        core::mem::take(&mut self.firing_log)
    }

    pub(crate) fn chain_after_change(&mut self) -> Result<()> {
        if self.config.auto_chain && self.has_forward_constraints() {
            self.forward_chain()?;
        }
        Ok(())
    }
}
