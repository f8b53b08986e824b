//! Knowledge-base files.
//!
//! A saved file is ordinary input: declarations in the order they were made,
//! then one `|=` line per situation (`w` first, the rest by name), then the
//! constraints by group and name. Loading replays it statement by statement,
//! so every fact is checked again on the way in.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sitkernel_core::ontology::Declared;
use sitkernel_core::syntax::{parse_statement, split_statements, AtomExpr, ConstraintDef, InfonExpr, InputMode, Statement};
use sitkernel_core::{Atom, Constraint, Infon, Kb, Mode};

use crate::Error;

const PREAMBLE: &str = "; sitkernel knowledge base\n; w, the world situation, is built in\n";

pub fn infon_expr(i: &Infon) -> InfonExpr {
    InfonExpr::Literal { relation: i.relation.clone(), args: i.args.clone(), polarity: i.polarity }
}

pub fn atom_expr(a: &Atom) -> AtomExpr {
    AtomExpr { situation: a.situation.clone(), mode: a.mode, infon: infon_expr(&a.infon) }
}

pub fn constraint_def(c: &Constraint) -> ConstraintDef {
    ConstraintDef {
        group: c.group.clone(),
        name: c.name.clone(),
        antecedents: c.antecedents.iter().map(atom_expr).collect(),
        direction: c.direction,
        consequents: c.consequents.iter().map(atom_expr).collect(),
        conditions: c.conditions.iter().map(infon_expr).collect(),
        class: c.class,
    }
}

/// The statement that recreates one declaration.
pub fn declaration(kb: &Kb, d: &Declared) -> Option<Statement> {
    use sitkernel_core::ontology::Entity;
    let reg = kb.registry();
    match d {
        Declared::Type(t) => {
            let ty = reg.type_abstraction(t)?;
            Some(Statement::TypeDef {
                name: ty.name.clone(),
                param: ty.param.clone(),
                grounding: ty.grounding.clone(),
                conditions: ty.conditions.iter().map(infon_expr).collect(),
            })
        }
        Declared::Name(n) => Some(match reg.entity(n)? {
            Entity::Object { kind, .. } => Statement::Object { name: n.clone(), kind: kind.clone() },
            Entity::Relation(r) => Statement::Relation {
                name: n.clone(),
                roles: r.roles.clone(),
                minimality: (r.minimality != r.arity()).then_some(r.minimality),
            },
            Entity::Parameter(p) => Statement::Parameter {
                name: n.clone(),
                base: p.base.clone(),
                restrictions: p.declared.iter().map(infon_expr).collect(),
            },
            Entity::Infon(i) => Statement::InfonName { name: n.clone(), infon: infon_expr(i) },
        }),
    }
}

/// Everything needed to rebuild `kb`, in file order.
pub fn statements(kb: &Kb) -> Vec<Statement> {
    let mut out: Vec<Statement> = kb.registry().declarations().iter().filter_map(|d| declaration(kb, d)).collect();
    let store = kb.store();
    let world = store.world().clone();
    let order = std::iter::once(&world).chain(store.situations().filter(|s| **s != world));
    for s in order {
        let infons: Vec<InfonExpr> =
            store.situation(s).into_iter().flat_map(|sit| sit.own()).filter(|i| !kb.is_bookkeeping(i)).map(infon_expr).collect();
        if !infons.is_empty() {
            out.push(Statement::Proposition { situation: s.clone(), mode: Mode::Supports, infons });
        }
    }
    out.extend(kb.constraints().map(|c| Statement::Constraint(constraint_def(c))));
    out
}

/// The file text for `kb`.
pub fn save_string(kb: &Kb) -> String {
    let mut text = String::from(PREAMBLE);
    for st in statements(kb) {
        let _ = writeln!(text, "{st}");
    }
    text
}

pub fn save_kb(kb: &Kb, path: &Path) -> Result<(), Error> {
    fs::write(path, save_string(kb)).map_err(|source| Error::Io { path: path.to_owned(), source })
}

/// Replays `text` into `kb`. Nothing is kept unless every statement succeeds.
pub fn load_str(kb: &mut Kb, text: &str) -> Result<(), Error> {
    let mut next = kb.clone();
    for (line, chunk) in split_statements(text) {
        let st = parse_statement(&chunk, InputMode::Assert).map_err(|e| Error::Syntax(e.offset_lines(line)))?;
        match st {
            Statement::Query(_) | Statement::Directive(_) => {
                return Err(Error::NotInFile { line: line + 1, statement: chunk.trim().to_owned() })
            }
            st => {
                next.apply(&st, None)
                    .map_err(|source| Error::Replay { line: line + 1, statement: chunk.trim().to_owned(), source })?;
            }
        }
    }
    next.take_firings();
    *kb = next;
    Ok(())
}

pub fn load_kb(kb: &mut Kb, path: &Path) -> Result<(), Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    load_str(kb, &text)
}
