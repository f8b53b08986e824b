//! Concrete syntax: statements, directives, and a printer that produces
//! text the parser reads back to an equal statement.
//!
//! ```text
//! bob: ~IND
//! <sees | ~IND, ~SIT> [1]
//! E = IND1 ^ <<sees, IND1, sit1, 1>>
//! ~SITALL = [SIT1 | w |= <<sees, bob, SIT1, 1>>]
//! infon1 = <<sees, bob, sit1, 1>>
//! sit2 |= {<<make-part-of, sit2, sit1, 1>>, infon1}
//! SPECIES: HUMAN: ?S |= <<human, ?X, 1>> <= ?S |= <<man, ?X, 1>>
//! ```
//!
//! ASCII operators are canonical; `⊨ ⊭ ≪ ≫ ⟨ ⟩ ← → ↔ ⇐ ⇒ ⇔` are accepted
//! as aliases.

mod lexer;
mod parser;
mod printer;


use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::engine::{ConstraintClass, Direction, Mode};
use crate::ontology::{Kind, ParamBase, Polarity, RoleKinds, Symbol, Term};

pub use parser::parse_statement;

/// Whether an ambiguous `situation |= infons` line is an assertion or a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputMode {
    #[default]
    Assert,
    Query,
}

/// Positioned parse failure. Lines and columns start at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Option<String>,
}

impl SyntaxError {
    pub(crate) fn at(text: &str, offset: usize, message: String, expected: Option<String>) -> SyntaxError {
        let before = &text[..offset.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        SyntaxError { line, column, message, expected }
    }

    /// Moves the position down by `lines`, for statements that start later in a file.
    pub fn offset_lines(mut self, lines: usize) -> SyntaxError {
        self.line += lines;
        self
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at line {}, column {}: {}", self.line, self.column, self.message)?;
        if let Some(e) = &self.expected {
            write!(f, " (expected {e})")?;
        }
        Ok(())
    }
}

impl core::error::Error for SyntaxError {}

/// An infon literal or the name of a declared infon, resolved on execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfonExpr {
    Literal { relation: Symbol, args: Vec<Term>, polarity: Polarity },
    Named(Symbol),
}

/// `situation |= infons` inside a query or constraint; one atom per infon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomExpr {
    pub situation: Term,
    pub mode: Mode,
    pub infon: InfonExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintDef {
    pub group: Symbol,
    pub name: Symbol,
    pub antecedents: Vec<AtomExpr>,
    pub direction: Direction,
    pub consequents: Vec<AtomExpr>,
    pub conditions: Vec<InfonExpr>,
    pub class: Option<ConstraintClass>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Listing {
    Situations,
    Relations,
    Constraints,
    Parameters,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Mode(InputMode),
    Anchor(Option<Symbol>),
    Perspective(Option<Symbol>),
    AntecedentPerspective(Option<Symbol>),
    Search(Option<Symbol>),
    /// `None` is unbounded.
    Solutions(Option<usize>),
    Trace(bool),
    AnchorTrace(bool),
    Anchors(bool),
    Chain,
    Load(String),
    Save(String),
    ExportDot(String),
    List(Listing),
    Quit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    /// `bob: ~IND`
    Object { name: Symbol, kind: Kind },
    /// `<sees | ~IND, ~SIT> [1]`; minimality defaults to the arity.
    Relation { name: Symbol, roles: Vec<RoleKinds>, minimality: Option<usize> },
    /// `E = IND1 ^ {...}` or `P = ~IND`.
    Parameter { name: Symbol, base: ParamBase, restrictions: Vec<InfonExpr> },
    /// `X = Y`: a parameter based on `Y`, or another name for the infon `Y`.
    Alias { name: Symbol, target: Symbol },
    /// `~T = [P | s |= {...}]`
    TypeDef { name: Symbol, param: Symbol, grounding: Symbol, conditions: Vec<InfonExpr> },
    /// `infon1 = <<...>>`
    InfonName { name: Symbol, infon: InfonExpr },
    Proposition { situation: Symbol, mode: Mode, infons: Vec<InfonExpr> },
    Constraint(ConstraintDef),
    Query(Vec<AtomExpr>),
    Directive(Directive),
}

fn balance_and_tail(text: &str) -> Option<(i64, Option<lexer::Tok>)> {
    let toks = lexer::lex(text).ok()?;
    let mut depth = 0i64;
    for t in &toks {
        match t.tok {
            lexer::Tok::LInfon | lexer::Tok::LBrace | lexer::Tok::LBracket => depth += 1,
            lexer::Tok::RInfon | lexer::Tok::RBrace | lexer::Tok::RBracket => depth -= 1,
            _ => {}
        }
    }
    Some((depth, toks.last().map(|t| t.tok.clone())))
}

fn is_directive(line: &str) -> bool {
    let t = line.trim_start();
    t.starts_with(':') && t[1..].starts_with(|c: char| c.is_ascii_alphabetic())
}

fn starts_clause(line: &str) -> bool {
    let t = line.trim_start();
    t.starts_with("UNDER-CONDITIONS") || t.starts_with("CLASS:") || t.starts_with("CLASS ")
}

fn continues(tail: &lexer::Tok) -> bool {
    use lexer::Tok;
    matches!(tail, Tok::Comma | Tok::Colon | Tok::Eq | Tok::Caret | Tok::Pipe | Tok::Supp(_) | Tok::Arrow(_) | Tok::LInfon | Tok::Lt)
}

/// Whether `text` ends inside an unfinished statement, for line-at-a-time input.
pub fn needs_more(text: &str) -> bool {
    if is_directive(text) {
        return false;
    }
    match balance_and_tail(text) {
        Some((depth, Some(tail))) => depth > 0 || continues(&tail),
        _ => false,
    }
}

/// Splits a script into statements. A statement continues on the next line
/// while brackets are open, when a line ends in `,`, `:`, `=`, `^`, `|`, a
/// support sign or an arrow, and when the next line starts an
/// `UNDER-CONDITIONS:` or `CLASS:` clause. Returns the 0-based starting line
/// of each statement with its text.
pub fn split_statements(text: &str) -> Vec<(usize, String)> {
    let lines: Vec<&str> = text.lines().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let start = i;
        let mut chunk = String::from(lines[i]);
        i += 1;
        if is_directive(&chunk) {
            out.push((start, chunk));
            continue;
        }
        loop {
            let Some((depth, tail)) = balance_and_tail(&chunk) else { break };
            let Some(tail) = tail else {
                // comment or blank line
                break;
            };
            let open = depth > 0 || continues(&tail) || (i < lines.len() && starts_clause(lines[i]));
            if !open || i >= lines.len() || is_directive(lines[i]) {
                break;
            }
            chunk.push('\n');
            chunk.push_str(lines[i]);
            i += 1;
        }
        if balance_and_tail(&chunk).is_none_or(|(_, t)| t.is_some()) {
            out.push((start, chunk));
        }
    }
    out
}

impl crate::kb::Kb {
    /// Builds a checked infon from its syntax; infon names are looked up now.
    pub fn resolve_infon(&self, e: &InfonExpr, allow_vars: bool) -> crate::Result<crate::ontology::Infon> {
        match e {
            InfonExpr::Named(n) => self.named_infon(n),
            InfonExpr::Literal { relation, args, polarity } => self.make_infon(relation, args.clone(), *polarity, allow_vars),
        }
    }

    pub fn resolve_atoms(&self, atoms: &[AtomExpr]) -> crate::Result<Vec<crate::engine::Atom>> {
        atoms
            .iter()
            .map(|a| Ok(crate::engine::Atom::new(a.situation.clone(), a.mode, self.resolve_infon(&a.infon, true)?)))
            .collect()
    }

    pub fn resolve_constraint(&self, c: &ConstraintDef) -> crate::Result<crate::engine::Constraint> {
        Ok(crate::engine::Constraint {
            group: c.group.clone(),
            name: c.name.clone(),
            antecedents: self.resolve_atoms(&c.antecedents)?,
            direction: c.direction,
            consequents: self.resolve_atoms(&c.consequents)?,
            conditions: c.conditions.iter().map(|k| self.resolve_infon(k, false)).collect::<crate::Result<_>>()?,
            class: c.class,
        })
    }
}

impl crate::kb::Kb {
    /// Executes a declaration, proposition or constraint definition.
    /// Propositions are read through `anchoring` when given. Queries and
    /// directives belong to the caller and are refused.
    pub fn apply(&mut self, st: &Statement, anchoring: Option<&str>) -> crate::Result<Vec<crate::engine::Firing>> {
        use crate::error::Error;
        use crate::ontology::Entity;
        let before = self.firing_log.len();
        match st {
            Statement::Object { name, kind } => self.declare_object(name, kind.clone())?,
            Statement::Relation { name, roles, minimality } => {
                self.declare_relation(name, roles.clone(), minimality.unwrap_or(roles.len()))?
            }
            Statement::Parameter { name, base, restrictions } => {
                let rs = restrictions.iter().map(|r| self.resolve_infon(r, false)).collect::<crate::Result<Vec<_>>>()?;
                self.declare_parameter(name, base.clone(), rs)?
            }
            Statement::Alias { name, target } => match self.registry.entity(target) {
                Some(Entity::Parameter(_)) => self.declare_parameter(name, ParamBase::Param(target.clone()), Vec::new())?,
                Some(Entity::Infon(i)) => {
                    let i = i.clone();
                    self.name_infon(name, i)?
                }
                Some(_) => return Err(Error::NotAnInfon(target.clone())),
                None => return Err(Error::UnknownName(target.clone())),
            },
            Statement::TypeDef { name, param, grounding, conditions } => {
                let cs = conditions.iter().map(|c| self.resolve_infon(c, false)).collect::<crate::Result<Vec<_>>>()?;
                self.define_type_abstraction(name, param, grounding, cs)?
            }
            Statement::InfonName { name, infon } => {
                let i = self.resolve_infon(infon, false)?;
                self.name_infon(name, i)?
            }
            Statement::Proposition { situation, mode, infons } => {
                let is = infons.iter().map(|i| self.resolve_infon(i, false)).collect::<crate::Result<Vec<_>>>()?;
                let prop = crate::store::Proposition { situation: situation.clone(), mode: *mode, infons: is };
                self.assert_proposition(&prop, anchoring)?;
            }
            Statement::Constraint(def) => {
                let c = self.resolve_constraint(def)?;
                self.define_constraint(c)?
            }
            Statement::Query(_) | Statement::Directive(_) => return Err(Error::NotApplicable),
        }
        Ok(self.firing_log[before..].to_vec())
    }
}
