//! Core of the sitkernel situation-theoretic reasoner.
//!
//! The crate holds everything that does not need an operating system:
//! the ontology of kinds, relations, parameters and infons ([`ontology`]),
//! situations with their part-of hierarchy, coherence and anchoring
//! ([`store`]), constraints with forward and backward chaining ([`engine`]),
//! query evaluation ([`query`]) and the concrete syntax ([`syntax`]).
//!
//! All state lives in a [`Kb`]. It is a plain value: clone it to take a
//! snapshot, share `&Kb` across threads for concurrent queries.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod engine;
mod error;
mod kb;
pub mod ontology;
pub mod query;
pub mod store;
pub mod syntax;

pub use engine::{Atom, Binding, Constraint, ConstraintClass, Direction, Firing, FiringOutcome, Mode};
pub use error::Error;
pub use kb::{Config, Kb};
pub use ontology::{BasicKind, Infon, Kind, Parameter, Polarity, Relation, Symbol, Term, TypeAbstraction};
pub use query::{Query, QueryOptions, Solution};
pub use store::{Proposition, Situation, Store};

pub type Result<T, E = Error> = core::result::Result<T, E>;
